"""Serve the shim: ``azp-modelshim --config shim.json --port 8900``.

Config file (JSON), all sections optional:

    {
      "mask": {"backend": "hf", "model": "bert-base-multilingual-cased"}
              or {"backend": "tiny", "seed": 7, "vocab": ["..."]},
      "translate": {"backend": "lexicon", "path": "maps.json"}
                   or {"backend": "identity"},
      "tag": {"backend": "rules", "path": "table.json", "default": "NN"}
    }

Model load failures abort startup with a diagnostic.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backends import (
    LexiconTranslateBackend,
    MaskedLMBackend,
    RuleTagBackend,
    build_tiny_masked_lm,
)
from .server import create_app


def load_backends(config: dict, device: str):
    mask = translate = tag = None
    section = config.get("mask")
    if section:
        kind = section.get("backend", "hf")
        if kind == "hf":
            mask = MaskedLMBackend.from_model_id(
                section["model"], device=device, sampling=section.get("sampling", False)
            )
        elif kind == "tiny":
            mask = build_tiny_masked_lm(
                vocab=section.get("vocab"),
                seed=section.get("seed", 7),
                sampling=section.get("sampling", False),
            )
        else:
            raise ValueError(f"unknown mask backend {kind!r}")
    section = config.get("translate")
    if section:
        kind = section.get("backend", "lexicon")
        if kind == "identity":
            translate = LexiconTranslateBackend()
        elif kind == "lexicon":
            translate = LexiconTranslateBackend(section.get("path"))
        else:
            raise ValueError(f"unknown translate backend {kind!r}")
    section = config.get("tag")
    if section:
        if section.get("backend", "rules") != "rules":
            raise ValueError(f"unknown tag backend {section.get('backend')!r}")
        tag = RuleTagBackend(section.get("path"), default=section.get("default", "NN"))
    return mask, translate, tag


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="azp-modelshim")
    parser.add_argument("--config", required=True, help="backend configuration (JSON)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8900)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        mask, translate, tag = load_backends(config, args.device)
    except Exception as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1

    import uvicorn

    app = create_app(mask_backend=mask, translate_backend=translate, tag_backend=tag)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
