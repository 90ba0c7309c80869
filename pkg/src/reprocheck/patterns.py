"""Versioned detection data: randomness/seed regexes, import aliases, stdlib lists.

Each list lives in ``reprocheck/data`` as a plain text file. A directory passed
as ``override_dir`` may shadow any of them by file name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

FILES = {
    "randomness": "randomness_patterns.txt",
    "seeds": "seed_patterns.txt",
    "aliases": "module_aliases.txt",
    "stdlib_py3": "stdlib_py3.txt",
    "stdlib_py2": "stdlib_py2.txt",
}


def _read(name: str, override_dir: Path | None) -> str:
    if override_dir is not None:
        candidate = Path(override_dir) / name
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    return resources.files("reprocheck.data").joinpath(name).read_text(encoding="utf-8")


def _lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _version(text: str) -> str:
    m = re.search(r"^#\s*list-version:\s*(\S+)", text, re.MULTILINE)
    return m.group(1) if m else "unversioned"


@dataclass(frozen=True)
class PatternSet:
    randomness: tuple[re.Pattern, ...]
    seeds: tuple[re.Pattern, ...]
    aliases: dict[str, tuple[str, ...]]
    stdlib: frozenset[str]
    versions: dict[str, str]

    def is_stdlib(self, module: str) -> bool:
        return module.split(".")[0] in self.stdlib

    def distributions_for(self, module: str) -> tuple[str, ...]:
        """Candidate distribution names for an imported top-level module."""
        from .repo.deps import normalize_name

        found: list[str] = []
        for key in (module, module.split(".")[0]):
            for dist in self.aliases.get(key, ()):
                if dist not in found:
                    found.append(dist)
        base = normalize_name(module.split(".")[0])
        if base not in found:
            found.append(base)
        return tuple(found)


@lru_cache(maxsize=8)
def load_patterns(override_dir: str | None = None) -> PatternSet:
    od = Path(override_dir) if override_dir else None
    texts = {key: _read(fname, od) for key, fname in FILES.items()}

    aliases: dict[str, tuple[str, ...]] = {}
    from .repo.deps import normalize_name

    for line in _lines(texts["aliases"]):
        if "=" not in line:
            continue
        module, dists = line.split("=", 1)
        aliases[module.strip()] = tuple(normalize_name(d) for d in dists.split(",") if d.strip())

    return PatternSet(
        randomness=tuple(re.compile(p) for p in _lines(texts["randomness"])),
        seeds=tuple(re.compile(p) for p in _lines(texts["seeds"])),
        aliases=aliases,
        stdlib=frozenset(_lines(texts["stdlib_py3"])) | frozenset(_lines(texts["stdlib_py2"])),
        versions={key: _version(t) for key, t in texts.items()},
    )
