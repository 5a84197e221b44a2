"""Part-of-speech tag inventory.

The default tagset is the reduced Penn-style inventory that Arabic taggers
commonly emit. It is configurable at the ingestion boundary (see
corpus.parse_tagged); the groupings below drive verb/nominal decisions in
the detection heuristics.
"""

# Sentence-boundary pseudo-tags. They appear only inside pattern windows,
# never on tokens.
SENT_START = "<S>"
SENT_END = "</S>"
BOUNDARY_TAGS = frozenset({SENT_START, SENT_END})

VERB_TAGS = frozenset({"VB", "VBD", "VBP", "VBN"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
PRONOUN_TAGS = frozenset({"PRP", "PRP$"})
NOMINAL_TAGS = NOUN_TAGS | frozenset({"PRP"})
PROPER_TAGS = frozenset({"NNP", "NNPS"})
PREP_TAGS = frozenset({"IN"})

DEFAULT_TAGSET = frozenset(
    {
        "CC", "CD", "DT", "FW", "IN", "JJ", "JJR", "NN", "NNS", "NNP",
        "NNPS", "PRP", "PRP$", "PUNC", "RB", "RP", "UH", "VB", "VBD",
        "VBN", "VBP", "WP", "WRB",
    }
)
