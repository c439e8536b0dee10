"""Unicode normalization shared by the harvest, dedup and KB matching paths."""

from __future__ import annotations

import unicodedata

# Sentence-final punctuation commonly emitted by LLMs at the end of list items.
TERMINAL_PUNCTUATION = "。．.，,；;！!？?、…~～:："


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def strip_terminal_punctuation(text: str) -> str:
    return text.strip().rstrip(TERMINAL_PUNCTUATION).strip()


def canonical_event_surface(text: str) -> str:
    """Dedup key for generated events: NFC, then whitespace and trailing
    punctuation stripped. Applying it twice changes nothing."""
    return strip_terminal_punctuation(nfc(text))


def normalized_match_key(text: str) -> str:
    """Key used by the KB ``normalized-exact`` matcher: NFC + whitespace strip
    only. Terminal punctuation is preserved (node lists may carry it on
    purpose)."""
    return nfc(text).strip()
