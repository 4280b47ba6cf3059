"""Chemical text normalization.

Raw OCR strings become token lists: Unicode NFKC folds sub/superscript
digits, a reagent lexicon unifies synonymous expressions ("ferric
chloride" and "FeCl3" map to the same key), and classic OCR confusions
(Cl read as CI, O as 0) are repaired, but only when the corrected token
is actually in the lexicon. Unknown tokens pass through untouched, so
normalization is idempotent.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from importlib import resources

# (wrong, right) single-character substitutions tried left to right
OCR_CONFUSIONS = (
    ("I", "l"),
    ("l", "I"),
    ("l", "1"),
    ("1", "l"),
    ("0", "O"),
    ("O", "0"),
    ("5", "S"),
    ("S", "5"),
)

_MAX_PHRASE_TOKENS = 4
_STRIP_CHARS = ",;.()[]{}"


@dataclass(frozen=True)
class Lexicon:
    """Synonym table: lowercased phrase -> canonical key."""

    phrases: dict
    canonical: frozenset

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Lexicon":
        phrases = {}
        for canonical_key, synonyms in mapping.items():
            phrases[canonical_key.lower()] = canonical_key
            for synonym in synonyms:
                phrases[synonym.lower()] = canonical_key
        return cls(phrases=phrases, canonical=frozenset(mapping))

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as handle:
            return cls.from_mapping(json.load(handle))

    def lookup(self, phrase: str) -> str | None:
        return self.phrases.get(phrase.lower())


_default: Lexicon | None = None


def default_lexicon() -> Lexicon:
    global _default
    if _default is None:
        text = resources.files("rxnparse.data").joinpath("lexicon.json").read_text("utf-8")
        _default = Lexicon.from_mapping(json.loads(text))
    return _default


def _tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.split():
        token = raw.strip(_STRIP_CHARS)
        # inner punctuation (commas in N,N-..., parens in Pd(PPh3)4) stays
        if token:
            tokens.append(token)
    return tokens


def _confusion_fix(token: str, lexicon: Lexicon) -> str | None:
    for position in range(len(token)):
        for wrong, right in OCR_CONFUSIONS:
            if token[position] != wrong:
                continue
            candidate = token[:position] + right + token[position + 1 :]
            hit = lexicon.lookup(candidate)
            if hit is not None:
                return hit
    return None


def normalize_text(raw: str, lexicon: Lexicon | None = None) -> list[str]:
    """Normalize an OCR string into canonical tokens.

    Longest lexicon phrase wins (up to four tokens); OCR-confusion repair
    applies only to tokens the lexicon does not already know and only
    when the repaired token is a lexicon entry.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    tokens = _tokenize(unicodedata.normalize("NFKC", raw))
    out: list[str] = []
    i = 0
    while i < len(tokens):
        matched = None
        span = 1
        for length in range(min(_MAX_PHRASE_TOKENS, len(tokens) - i), 0, -1):
            phrase = " ".join(tokens[i : i + length])
            hit = lexicon.lookup(phrase)
            if hit is not None:
                matched = hit
                span = length
                break
        if matched is None:
            matched = _confusion_fix(tokens[i], lexicon) or tokens[i]
        out.append(matched)
        i += span
    return out
