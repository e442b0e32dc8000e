"""Readers and writers for the small text formats around the pipeline.

* native partitions: one block per line, members sorted and separated by a
  space, blocks sorted; ``@topic <id>`` lines open a topic section
* CoNLL-style key/response files accepted by the reference coreference scorer
* gazetteer: ``place > parent > grandparent`` chains, one per line
* lexicon: one lemma per line

Every format is UTF-8, and ``#`` starts a comment in the native, gazetteer
and lexicon formats. Full grammar in docs/formats.md.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError
from .metrics import Partition
from .model import EntityRef, normalize_entity

DEFAULT_TOPIC = "_"


# --- native partition format -------------------------------------------------

def write_partitions(parts: Mapping[str, Partition]) -> str:
    out = []
    for topic in sorted(parts):
        out.append(f"@topic {topic}\n")
        for block in parts[topic].sorted_blocks():
            out.append(" ".join(block) + "\n")
    return "".join(out)


def read_partitions(text: str, source: str = "<string>") -> dict[str, Partition]:
    blocks: dict[str, list[list[str]]] = {}
    topic = DEFAULT_TOPIC
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@topic"):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected '@topic <id>'", source, lineno)
            topic = parts[1]
            blocks.setdefault(topic, [])
            continue
        blocks.setdefault(topic, []).append(line.split())
    out = {}
    for t, bs in blocks.items():
        try:
            out[t] = Partition(bs)
        except ValueError as exc:
            raise ParseError(f"topic {t}: {exc}", source) from None
    return out


# --- CoNLL-style cluster format ---------------------------------------------
#
#   #begin document (<topic>); part 000
#   <topic>\t0\t<mention id>\t(<cluster number>)
#   #end document
#
# Each mention is a one-token mention. A "-" coreference column marks a
# mention outside every chain, read as a singleton.

_BEGIN_RE = re.compile(r"^#begin document \((?P<doc>[^)]*)\);?\s*(?:part\s+(?P<part>\d+))?")
_CHAIN_RE = re.compile(r"^\((\d+)\)$")


def write_conll(parts: Mapping[str, Partition]) -> str:
    out = []
    for topic in sorted(parts):
        out.append(f"#begin document ({topic}); part 000\n")
        chain_of = {}
        for n, block in enumerate(parts[topic].sorted_blocks()):
            for m in block:
                chain_of[m] = n
        for m in sorted(chain_of):
            out.append(f"{topic}\t0\t{m}\t({chain_of[m]})\n")
        out.append("#end document\n")
    return "".join(out)


def read_conll(text: str, source: str = "<string>") -> dict[str, Partition]:
    out: dict[str, Partition] = {}
    topic = None
    chains: dict[str, list[str]] = {}
    singles: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        m = _BEGIN_RE.match(line)
        if m:
            if topic is not None:
                raise ParseError("nested #begin document", source, lineno)
            topic, chains, singles = m.group("doc"), {}, []
            continue
        if line.startswith("#end document"):
            if topic is None:
                raise ParseError("#end document without #begin", source, lineno)
            if topic in out:
                raise ParseError(f"document {topic!r} appears twice", source, lineno)
            try:
                out[topic] = Partition(list(chains.values()) + [[s] for s in singles])
            except ValueError as exc:
                raise ParseError(str(exc), source, lineno) from None
            topic = None
            continue
        if line.startswith("#"):
            continue
        if topic is None:
            raise ParseError("mention line outside a document", source, lineno)
        cols = line.split()
        if len(cols) < 4:
            raise ParseError("expected '<doc> <part> <mention> <coref>'", source, lineno)
        mention, coref = cols[2], cols[-1]
        if coref == "-":
            singles.append(mention)
            continue
        cm = _CHAIN_RE.match(coref)
        if not cm:
            raise ParseError(f"unsupported coreference column {coref!r}", source, lineno)
        chains.setdefault(cm.group(1), []).append(mention)
    if topic is not None:
        raise ParseError("missing #end document", source)
    return out


def read_partition_file(path: str | Path) -> dict[str, Partition]:
    """Read either format, sniffing for ``#begin document``."""
    text = Path(path).read_text(encoding="utf-8")
    if any(line.startswith("#begin document") for line in text.splitlines()):
        return read_conll(text, str(path))
    return read_partitions(text, str(path))


# --- gazetteer -------------------------------------------------------------

def read_gazetteer(text: str, source: str = "<string>") -> dict[str, tuple[EntityRef, ...]]:
    """Map each place id to its containing places, most specific first.

    A chain line ``a > b > c`` also implies the ancestry of ``b`` (``c``).
    An explicit line for a place wins over one implied by a longer chain.
    """
    explicit: dict[str, tuple[EntityRef, ...]] = {}
    implied: dict[str, tuple[EntityRef, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            chain = [normalize_entity(p) for p in line.split(">")]
        except Exception as exc:
            raise ParseError(str(exc), source, lineno) from None
        if len(set(chain)) != len(chain):
            raise ParseError("place repeated within a chain", source, lineno)
        head = chain[0].id
        if head in explicit:
            raise ParseError(f"place {head!r} defined twice", source, lineno)
        explicit[head] = tuple(chain[1:])
        for i in range(1, len(chain) - 1):
            implied.setdefault(chain[i].id, tuple(chain[i + 1:]))
    return {**implied, **explicit}


def load_gazetteer(path: str | Path) -> dict[str, tuple[EntityRef, ...]]:
    return read_gazetteer(Path(path).read_text(encoding="utf-8"), str(path))


# --- lexicon ---------------------------------------------------------------

def read_lexicon(text: str) -> frozenset[str]:
    out = set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.add(line)
    return frozenset(out)


def load_lexicon(path: str | Path) -> frozenset[str]:
    return read_lexicon(Path(path).read_text(encoding="utf-8"))


def write_lines(lines: Iterable[str]) -> str:
    return "".join(f"{x}\n" for x in lines)
