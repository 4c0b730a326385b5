"""Canonical rooted-subgraph extraction and vocabulary construction.

A degree-d rooted subgraph around node v is canonicalized by the iterative
relabeling scheme: the degree-0 form is the node label itself, and the
degree-d form is the node's degree-(d-1) form followed by the sorted list of
its neighbors' degree-(d-1) forms. Children are sorted, so the encoding is
invariant under any permutation of host-graph node ids.

Encodings use the delimiters ``(`` ``,`` ``)``; these characters (and the
backslash) are backslash-escaped inside node labels, which makes every
encoding prefix-unambiguous and lets the number of top-level groups determine
the degree.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, BoundsError, EmptyDatasetError, FormatError
from .graphs import Graph, GraphDataset

_ESCAPES = str.maketrans({"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,"})


def escape_label(label: str) -> str:
    return label.translate(_ESCAPES)


@dataclass(frozen=True)
class CanonicalSubgraph:
    canonical: str
    degree: int


def wl_encodings(g: Graph, max_degree: int) -> list[list[str]]:
    """Canonical strings for every node at every degree 0..max_degree.

    Returns ``enc`` with ``enc[d][v]`` the degree-d canonical rooted at v.
    """
    if max_degree < 0:
        raise ArgumentError(f"degree must be >= 0, got {max_degree}")
    level = [escape_label(g.node_labels[v]) for v in g.nodes]
    enc = [level]
    for _ in range(max_degree):
        prev = enc[-1]
        level = [
            prev[v] + "(" + ",".join(sorted(prev[w] for w in g.neighbors(v))) + ")"
            for v in g.nodes
        ]
        enc.append(level)
    return enc


def get_wl_subgraph(v: int, g: Graph, d: int) -> CanonicalSubgraph:
    """Canonical degree-d rooted subgraph around node v."""
    if d < 0:
        raise ArgumentError(f"degree must be >= 0, got {d}")
    if not 0 <= v < g.num_nodes:
        raise BoundsError(f"node id {v} out of range [0, {g.num_nodes})")
    return CanonicalSubgraph(wl_encodings(g, d)[d][v], d)


@dataclass
class SubgraphVocab:
    """Interning table over every rooted subgraph extracted from a corpus.

    Ids are dense 0..len-1, assigned by ascending lexicographic order of the
    canonical strings. ``frequencies[i]`` counts every (graph, node, degree)
    occurrence of entry i across the corpus.
    """

    entries: dict[str, int]
    canonicals: list[str]
    frequencies: np.ndarray
    degrees: np.ndarray
    max_degree: int
    compressed: bool = False
    # raw-string -> code tables per level; present only when compressed
    levels: tuple[dict[str, str], ...] | None = None
    _noise_cache: dict[float, np.ndarray] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.canonicals)

    def id_of(self, canonical: str) -> int | None:
        return self.entries.get(canonical)

    def noise_cdf(self, power: float = 0.75) -> np.ndarray:
        """Cumulative noise distribution: unigram frequency ** power."""
        cdf = self._noise_cache.get(power)
        if cdf is None:
            weights = self.frequencies.astype(np.float64) ** power
            cdf = np.cumsum(weights / weights.sum())
            self._noise_cache[power] = cdf
        return cdf

    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(f"{self.max_degree}\n".encode())
        for c in self.canonicals:
            h.update(c.encode())
            h.update(b"\n")
        return h.hexdigest()[:12]


def _compressed_corpus_tables(
    ds: GraphDataset, max_degree: int
) -> tuple[list[dict[str, str]], Counter, dict[str, int]]:
    """Level-synchronous extraction with global string interning.

    After each level is computed for all nodes of all graphs, the distinct
    strings are replaced by compact decimal codes reused at the next level.
    Codes are drawn from one global counter, so equal code strings can never
    denote subgraphs of different degrees.
    """
    tables: list[dict[str, str]] = []
    counts: Counter = Counter()
    degree_of: dict[str, int] = {}
    next_code = 0
    codes = [
        [escape_label(g.node_labels[v]) for v in g.nodes] for g in ds.graphs
    ]  # per-graph current-level raw strings
    for d in range(max_degree + 1):
        if d > 0:
            codes = [
                [
                    prev[v] + "(" + ",".join(sorted(prev[w] for w in g.neighbors(v))) + ")"
                    for v in g.nodes
                ]
                for g, prev in zip(ds.graphs, codes)
            ]
        table: dict[str, str] = {}
        for row in codes:
            for raw in row:
                counts[raw] += 1
                if raw not in table:
                    table[raw] = ""
        for raw in sorted(table):
            table[raw] = str(next_code)
            degree_of[raw] = d
            next_code += 1
        tables.append(table)
        codes = [[table[raw] for raw in row] for row in codes]
    return tables, counts, degree_of


def build_subgraph_vocab(
    ds: GraphDataset, max_degree: int, compress: bool = False
) -> SubgraphVocab:
    """Collect every rooted subgraph of degree 0..max_degree across a dataset.

    With ``compress`` the canonical strings intern each level's encodings to
    compact codes before composing the next level (keeps strings short on deep
    extractions); the grouping of occurrences into entries is identical either
    way, only the stored representative strings differ. Compressed vocabularies
    keep their intern tables in memory and are not meant for file round-trips.
    """
    if max_degree < 0:
        raise ArgumentError(f"degree must be >= 0, got {max_degree}")
    if len(ds) == 0:
        raise EmptyDatasetError("cannot build a vocabulary from an empty dataset")

    if compress:
        tables, counts, degree_of = _compressed_corpus_tables(ds, max_degree)
        levels: tuple[dict[str, str], ...] | None = tuple(tables)
    else:
        counts = Counter()
        degree_of = {}
        for g in ds.graphs:
            for d, row in enumerate(wl_encodings(g, max_degree)):
                for s in row:
                    counts[s] += 1
                    if s not in degree_of:
                        degree_of[s] = d
        levels = None

    canonicals = sorted(counts)
    entries = {c: i for i, c in enumerate(canonicals)}
    return SubgraphVocab(
        entries=entries,
        canonicals=canonicals,
        frequencies=np.array([counts[c] for c in canonicals], dtype=np.int64),
        degrees=np.array([degree_of[c] for c in canonicals], dtype=np.int32),
        max_degree=max_degree,
        compressed=compress,
        levels=levels,
    )


def encoding_id_table(g: Graph, vocab: SubgraphVocab) -> list[list[int]]:
    """Vocab ids for every (node, degree) of g; -1 marks unseen subgraphs.

    A subgraph absent from the vocabulary is dropped, and in compressed mode
    an unseen child makes every enclosing subgraph unseen as well.
    """
    D = vocab.max_degree
    if not vocab.compressed:
        enc = wl_encodings(g, D)
        return [[vocab.entries.get(s, -1) for s in row] for row in enc]

    assert vocab.levels is not None
    ids: list[list[int]] = []
    codes: list[str | None] = [escape_label(g.node_labels[v]) for v in g.nodes]
    for d in range(D + 1):
        if d > 0:
            prev = codes
            codes = []
            for v in g.nodes:
                own = prev[v]
                children = [prev[w] for w in g.neighbors(v)]
                if own is None or any(c is None for c in children):
                    codes.append(None)
                else:
                    codes.append(own + "(" + ",".join(sorted(children)) + ")")
        table = vocab.levels[d]
        row = []
        new_codes: list[str | None] = []
        for raw in codes:
            if raw is None or raw not in table:
                row.append(-1)
                new_codes.append(None)
            else:
                row.append(vocab.entries[raw])
                new_codes.append(table[raw])
        ids.append(row)
        codes = new_codes
    return ids


def subgraph_count_vector(g: Graph, vocab: SubgraphVocab) -> dict[int, int]:
    """Occurrence counts of g's rooted subgraphs over the vocabulary ids."""
    counts: dict[int, int] = {}
    for row in encoding_id_table(g, vocab):
        for sid in row:
            if sid >= 0:
                counts[sid] = counts.get(sid, 0) + 1
    return counts


_FILE_ESCAPES = str.maketrans({"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"})
_FILE_UNESCAPES = {"\\\\": "\\", "\\t": "\t", "\\n": "\n", "\\r": "\r"}


def _file_escape(s: str) -> str:
    return s.translate(_FILE_ESCAPES)


def _file_unescape(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            pair = s[i : i + 2]
            if pair in _FILE_UNESCAPES:
                out.append(_FILE_UNESCAPES[pair])
                i += 2
                continue
        out.append(s[i])
        i += 1
    return "".join(out)


def save_vocab(vocab: SubgraphVocab, path: str) -> None:
    """Write one ``<id>\\t<degree>\\t<frequency>\\t<canonical>`` line per entry."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, c in enumerate(vocab.canonicals):
            fh.write(f"{i}\t{vocab.degrees[i]}\t{vocab.frequencies[i]}\t{_file_escape(c)}\n")


def load_vocab(path: str) -> SubgraphVocab:
    canonicals: list[str] = []
    freqs: list[int] = []
    degs: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 tab-separated fields")
            sid, deg, freq, canonical = parts
            if int(sid) != len(canonicals):
                raise FormatError(f"{path}:{lineno}: ids must be dense and ascending")
            canonicals.append(_file_unescape(canonical))
            degs.append(int(deg))
            freqs.append(int(freq))
    if not canonicals:
        raise FormatError(f"{path}: empty vocabulary file")
    return SubgraphVocab(
        entries={c: i for i, c in enumerate(canonicals)},
        canonicals=canonicals,
        frequencies=np.array(freqs, dtype=np.int64),
        degrees=np.array(degs, dtype=np.int32),
        max_degree=int(max(degs)),
    )
