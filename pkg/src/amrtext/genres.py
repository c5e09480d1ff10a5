"""Genre lookup from LDC document-id prefixes."""

from __future__ import annotations

from typing import Dict, Optional

# Longest matching prefix wins.  Assumed mapping of LDC AMR id conventions;
# override with a genre map file when the corpus uses other ids.
DEFAULT_GENRE_MAP: Dict[str, str] = {
    "wb.": "weblog",
    "nw.wsj": "wsj",
    "wsj_": "wsj",
    "nw.": "newswire",
    "PROXY_": "proxy",
    "NW_XIN": "xinhua",
    "xinhua": "xinhua",
    "bolt": "forum",
    "DF-": "forum",
}


def load_genre_map(path) -> Dict[str, str]:
    """Read ``id-prefix<TAB>genre`` lines."""
    mapping = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"{path}:{lineno}: expected 'prefix<TAB>genre'")
            mapping[parts[0]] = parts[1]
    return mapping


def genre_for_id(example_id: str, genre_map: Optional[Dict[str, str]] = None) -> Optional[str]:
    genre_map = DEFAULT_GENRE_MAP if genre_map is None else genre_map
    best = None
    for prefix, genre in genre_map.items():
        if example_id.startswith(prefix) and (best is None or len(prefix) > len(best[0])):
            best = (prefix, genre)
    return best[1] if best else None
