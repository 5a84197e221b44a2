"""Serving process for the azpaug provider wire protocol: masked-LM
predictions, translation and Arabic tagging behind /v1/mask,
/v1/translate and /v1/tag."""

__version__ = "0.1.0"
