"""Claim-verification toolkit: corpus pipeline, classifier, fuzzy claim
retrieval, headline extraction, crowdsourced vote store, and the HTTP API
that ties them together."""

__version__ = "0.1.0"
