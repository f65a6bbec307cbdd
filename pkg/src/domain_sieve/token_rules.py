"""Frozen tokenizer rules shared by both kernel implementations.

The tokenizer behaviour is part of the reproducibility contract: vocabulary
files, model weights and corpus scores are only comparable between runs that
used the same rules. Changing anything here is a format-version event.

Rules (applied in order, per sentence):

1. lowercase the whole sentence (CPython ``str.lower`` semantics),
2. split on unicode whitespace (``str.split`` with no argument),
3. strip leading and trailing punctuation characters (the fixed set below),
4. drop tokens that are now empty,
5. replace purely-digit tokens with the placeholder ``<num>``.

Interior punctuation is kept ("don't", "co-op"). The punctuation set is ASCII
punctuation plus the common typographic characters that show up in web and
news text; it is intentionally a closed list rather than a unicode-category
scan so the compiled and pure-Python tokenizers can share one table.
"""

import string

NUM_TOKEN = "<num>"

PUNCT_CHARS = (
    string.punctuation
    + "¡¿"                          # inverted exclamation / question
    + "«»‹›"              # guillemets
    + "‐‑‒–—―"  # hyphens and dashes
    + "‘’‚‛"              # single curly quotes
    + "“”„‟"              # double curly quotes
    + "•·"                          # bullets
    + "…"                                # ellipsis
)
