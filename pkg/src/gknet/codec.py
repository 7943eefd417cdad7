"""Zero-error block codecs built on a source decomposition.

Every stream is a sequence of canonical Huffman codewords, one per symbol,
with the table for position t selected by information the decoder already
holds at t (the component stream first, conditional tables after it), so
decoding is exact on every supported input with no typicality assumption.
The component stream alone falls back to fixed-width binary when the block's
component sequence is atypical; conditional tables remain valid for any
component sequence, so the residual streams stay entropy-coded.

Wire format (transport blocks): header = 32-bit blocklength, 1 typicality
flag bit, 32-bit Q16.16 epsilon, 1 extended-header bit (set only for
helper-coded blocks, followed by a 32-bit Q16.16 gamma and a 64-bit seed),
zero-padded to a byte boundary; then each stream as a 64-bit big-endian bit
count plus its payload, zero-padded to a byte boundary, concatenated in the
order k, x, y.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import floor, log2
from typing import Mapping, Sequence

from .bitio import EMPTY_BITS, BitReader, Bits, BitWriter
from .common_info import (
    ComponentPartition,
    SourceDecomposition,
    refinement_table,
)
from .errors import (
    BindingError,
    DecodeError,
    InvalidInputError,
    NestingError,
)
from .feasibility import MODE_COMMON_INFORMATION, MessagePlan
from .probability import SymbolSequence, is_strongly_typical

STREAM_ORDER = ("k", "x", "y")


@dataclass(frozen=True)
class PrefixCode:
    """Canonical prefix-free code; a single-symbol support uses zero bits."""

    codes: dict  # symbol -> (codeword value, length)
    decode_map: dict  # (length, value) -> symbol
    max_len: int

    def encode_into(self, writer: BitWriter, symbol) -> None:
        value, nbits = self.codes[symbol]
        writer.write(value, nbits)

    def decode_from(self, reader: BitReader):
        if self.max_len == 0:
            return self.decode_map[(0, 0)]
        acc = 0
        for length in range(1, self.max_len + 1):
            acc = (acc << 1) | reader.read_bit()
            sym = self.decode_map.get((length, acc))
            if sym is not None:
                return sym
        raise DecodeError("no codeword matches the bitstream")

    def kraft_sum(self) -> float:
        return sum(2.0 ** -nbits for _, nbits in self.codes.values())

    def expected_length(self, probs: Mapping) -> float:
        return sum(p * self.codes[s][1] for s, p in probs.items())


def build_prefix_code(probs: Mapping, order: Mapping | None = None) -> PrefixCode:
    """Canonical Huffman code over the support of ``probs``.

    ``order`` breaks ties deterministically: at equal probability the symbol
    with the smaller order never receives the longer codeword.
    """
    if not probs:
        raise ValueError("cannot build a code over an empty support")
    if order is None:
        order = {s: i for i, s in enumerate(probs)}
    syms = sorted(probs, key=order.__getitem__)
    if len(syms) == 1:
        return PrefixCode({syms[0]: (0, 0)}, {(0, 0): syms[0]}, 0)

    heap = [(float(probs[s]), i, (s,)) for i, s in enumerate(syms)]
    heapq.heapify(heap)
    counter = len(syms)
    depth = {s: 0 for s in syms}
    while len(heap) > 1:
        p1, _, g1 = heapq.heappop(heap)
        p2, _, g2 = heapq.heappop(heap)
        for s in g1 + g2:
            depth[s] += 1
        heapq.heappush(heap, (p1 + p2, counter, g1 + g2))
        counter += 1

    # reassign the computed length multiset so the tie rule holds exactly
    lengths = sorted(depth.values())
    by_prob = sorted(syms, key=lambda s: (-probs[s], order[s]))
    length_of = dict(zip(by_prob, lengths))

    canon = sorted(syms, key=lambda s: (length_of[s], order[s]))
    codes = {}
    code = 0
    prev = length_of[canon[0]]
    for s in canon:
        length = length_of[s]
        code <<= length - prev
        codes[s] = (code, length)
        prev = length
        code += 1
    decode_map = {(nbits, value): s for s, (value, nbits) in codes.items()}
    return PrefixCode(codes, decode_map, max(lengths))


@dataclass(frozen=True)
class Codebook:
    """All prefix codes needed to encode a decomposed source pair.

    ``class_codes[var][i]`` codes the within-component index of ``var`` in
    component i; ``k_code`` codes the component index itself;
    ``marginal_codes[var]`` codes the raw symbol and is used where the
    decoder has no component information. ``fallback_width`` is the
    fixed-width bits per symbol used for an atypical component sequence.
    """

    partition: ComponentPartition
    decomps: dict
    k_code: PrefixCode
    fallback_width: int
    class_codes: dict
    marginal_codes: dict


def build_codebook(partition: ComponentPartition, decomps) -> Codebook:
    """Canonical Huffman tables for a partition and its source splits."""
    if isinstance(decomps, Mapping):
        dec = dict(decomps)
    else:
        dec = {d.variable: d for d in decomps}
    for var, d in dec.items():
        if var not in partition.variables:
            raise BindingError(f"decomposition variable {var!r} not in the partition")
        if len(d.conditionals) != len(partition.components):
            raise ValueError(f"decomposition of {var!r} does not match the partition")
    for comp in partition.components:
        for var in dec:
            if not comp.members[var]:
                raise ValueError(f"component with no {var!r} member")

    k_probs = {i: w for i, w in enumerate(partition.weights)}
    k_code = build_prefix_code(k_probs, {i: i for i in k_probs})
    fallback_width = max(len(partition.components) - 1, 0).bit_length()

    class_codes = {}
    marginal_codes = {}
    for var, d in dec.items():
        tables = []
        marg = {}
        for ci, cond in enumerate(d.conditionals):
            probs = {j: p for j, p in enumerate(cond)}
            tables.append(build_prefix_code(probs, {j: j for j in probs}))
            for j, p in enumerate(cond):
                marg[d.inverse[(ci, j)]] = partition.weights[ci] * p
        class_codes[var] = tuple(tables)
        rank = {s: i for i, s in enumerate(partition.alphabets[var])}
        marginal_codes[var] = build_prefix_code(marg, rank)
    return Codebook(partition, dec, k_code, fallback_width, class_codes, marginal_codes)


@dataclass
class EncodedBlock:
    """Self-delimiting zero-error block: named bitstreams plus header data."""

    n: int
    typical: bool
    epsilon: float
    streams: dict
    rates: dict = field(default_factory=dict)
    gamma: float | None = None
    seed: int | None = None

    def to_bytes(self) -> bytes:
        w = BitWriter()
        w.write(self.n, 32)
        w.write(1 if self.typical else 0, 1)
        w.write(_q16(self.epsilon), 32)
        if self.gamma is None:
            w.write(0, 1)
        else:
            w.write(1, 1)
            w.write(_q16(self.gamma), 32)
            w.write(int(self.seed or 0) & (2**64 - 1), 64)
        w.pad_to_byte()
        out = bytearray(w.to_bits().data)
        for name in _stream_names(self.streams):
            bits = self.streams[name]
            out += bits.nbits.to_bytes(8, "big")
            out += bits.data
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedBlock":
        if len(data) < 9:
            raise DecodeError("block shorter than its header")
        r = BitReader(Bits(data, len(data) * 8))
        n = r.read(32)
        typical = bool(r.read_bit())
        epsilon = r.read(32) / 65536.0
        extended = bool(r.read_bit())
        gamma = seed = None
        if extended:
            if len(data) < 21:
                raise DecodeError("block shorter than its extended header")
            gamma = r.read(32) / 65536.0
            seed = r.read(64)
        pos = (66 + (96 if extended else 0) + 7) // 8
        payloads = []
        while pos < len(data):
            if pos + 8 > len(data):
                raise DecodeError("truncated stream length prefix")
            nbits = int.from_bytes(data[pos : pos + 8], "big")
            pos += 8
            nbytes = (nbits + 7) // 8
            if pos + nbytes > len(data):
                raise DecodeError("truncated stream payload")
            payloads.append(Bits(data[pos : pos + nbytes], nbits))
            pos += nbytes
        names = ("k", "x") if extended else STREAM_ORDER
        if len(payloads) > len(names):
            raise DecodeError("more streams than the block layout allows")
        streams = dict(zip(names, payloads))
        rates = {name: (b.nbits / n if n else 0.0) for name, b in streams.items()}
        return cls(n, typical, epsilon, streams, rates, gamma, seed)


def _q16(value: float) -> int:
    return max(0, min(2**32 - 1, round(float(value) * 65536.0)))


def _stream_names(streams: Mapping) -> list:
    known = [name for name in STREAM_ORDER if name in streams]
    extra = [name for name in streams if name not in STREAM_ORDER]
    return known + sorted(extra)


def _paired_symbols(x: SymbolSequence, y: SymbolSequence, part: ComponentPartition):
    if len(part.variables) != 2:
        raise ValueError("codebook partition must cover exactly two variables")
    seqs = {x.variable: x, y.variable: y}
    if set(seqs) != set(part.variables):
        raise BindingError(
            f"sequences for {sorted(seqs)} do not match partition variables "
            f"{sorted(part.variables)}"
        )
    vx, vy = part.variables
    xs = seqs[vx].symbols
    ys = seqs[vy].symbols
    n = len(xs)
    if n == 0 or len(ys) != n:
        raise ValueError("sequences must share a positive length")
    k_list = []
    for i, pair in enumerate(zip(xs, ys)):
        if pair not in part.support:
            raise InvalidInputError(
                f"pair {pair!r} at position {i} is outside the joint support"
            )
        k_list.append(part.class_of[vx][pair[0]])
    return vx, vy, xs, ys, k_list


def _encode_k(k_list, book: Codebook, epsilon: float):
    weights = {i: w for i, w in enumerate(book.partition.weights)}
    if k_list:
        typical = is_strongly_typical(SymbolSequence("K", tuple(k_list)), weights, epsilon)
    else:
        typical = True
    w = BitWriter()
    if typical:
        for k in k_list:
            book.k_code.encode_into(w, k)
    else:
        for k in k_list:
            w.write(k, book.fallback_width)
    return typical, w.to_bits()


def _encode_conditional(symbols, k_list, book: Codebook, var: str) -> Bits:
    decomp = book.decomps[var]
    tables = book.class_codes[var]
    w = BitWriter()
    for s, k in zip(symbols, k_list):
        tables[k].encode_into(w, decomp.forward[s][1])
    return w.to_bits()


def encode_multicast_block(
    x: SymbolSequence, y: SymbolSequence, book: Codebook, epsilon: float
) -> EncodedBlock:
    """Encode a supported pair block into k, x, y streams, exactly invertible."""
    part = book.partition
    vx, vy, xs, ys, k_list = _paired_symbols(x, y, part)
    typical, k_bits = _encode_k(k_list, book, epsilon)
    x_bits = _encode_conditional(xs, k_list, book, vx)
    y_bits = _encode_conditional(ys, k_list, book, vy)
    n = len(xs)
    streams = {"k": k_bits, "x": x_bits, "y": y_bits}
    rates = {name: b.nbits / n for name, b in streams.items()}
    return EncodedBlock(n, typical, epsilon, streams, rates)


def decode_k_stream(block: EncodedBlock, book: Codebook, count: int | None = None):
    """Recover the component-index sequence from a block's k stream."""
    if "k" not in block.streams:
        raise DecodeError("missing stream k")
    n = block.n if count is None else count
    reader = BitReader(block.streams["k"])
    k_list = []
    ncomp = len(book.partition.components)
    for i in range(n):
        try:
            if block.typical:
                k = book.k_code.decode_from(reader)
            else:
                k = reader.read(book.fallback_width)
        except DecodeError as exc:
            raise DecodeError(f"stream k, symbol {i}: {exc}") from None
        if not 0 <= k < ncomp:
            raise DecodeError(f"stream k, symbol {i}: component {k} out of range")
        k_list.append(k)
    if reader.remaining:
        raise DecodeError("stream k carries trailing bits")
    return k_list


def decode_symbol_stream(
    block: EncodedBlock, book: Codebook, var: str, k_list
) -> SymbolSequence:
    """Decode one variable's conditional stream given the component sequence."""
    name = "x" if var == book.partition.variables[0] else "y"
    if name not in block.streams:
        raise DecodeError(f"missing stream {name}")
    decomp = book.decomps[var]
    tables = book.class_codes[var]
    reader = BitReader(block.streams[name])
    symbols = []
    for i, k in enumerate(k_list):
        try:
            j = tables[k].decode_from(reader)
        except DecodeError as exc:
            raise DecodeError(f"stream {name}, symbol {i}: {exc}") from None
        symbols.append(decomp.inverse[(k, j)])
    if reader.remaining:
        raise DecodeError(f"stream {name} carries trailing bits")
    return SymbolSequence(var, tuple(symbols))


def decode_multicast_block(block: EncodedBlock, book: Codebook):
    """Exact reconstruction of the encoded pair; k stream decodes first."""
    vx, vy = book.partition.variables
    k_list = decode_k_stream(block, book)
    return (
        decode_symbol_stream(block, book, vx, k_list),
        decode_symbol_stream(block, book, vy, k_list),
    )


def _rank_codes(fine: ComponentPartition, coarse: ComponentPartition, var: str):
    """Per coarse class, a prefix code over the ranks of its fine classes."""
    table = refinement_table(fine, coarse, var)
    rank_of = {}
    codes = {}
    for ci, fis in table.items():
        probs = {}
        for r, fi in enumerate(fis):
            rank_of[fi] = (ci, r)
            probs[r] = fine.weights[fi] / coarse.weights[ci]
        codes[ci] = build_prefix_code(probs, {r: r for r in probs})
    return rank_of, codes


def encode_bsi_messages(
    x: SymbolSequence,
    plan: MessagePlan,
    partitions: Sequence[ComponentPartition],
    decomps: Sequence[SourceDecomposition],
):
    """Per-level message streams for broadcast with side information.

    M_1 entropy-codes the within-class index under the finest partition; each
    later M_i entropy-codes the rank of the level-(i-1) class inside the
    level-i class. Terminal i recovers x exactly from M_1..M_i plus its own
    side sequence, which pins the level-i class at every position.
    """
    if plan.mode != MODE_COMMON_INFORMATION:
        raise ValueError("payload encoding needs a common-information plan")
    partitions = list(partitions)
    if len(partitions) != len(plan.messages):
        raise BindingError(
            f"{len(plan.messages)} planned messages but {len(partitions)} partitions"
        )
    var = plan.source_variable
    if x.variable != var:
        raise BindingError(f"sequence is for {x.variable!r}, plan is for {var!r}")
    decomp = decomps[0] if not isinstance(decomps, SourceDecomposition) else decomps
    if decomp.variable != var or len(decomp.conditionals) != len(partitions[0].components):
        raise BindingError("level-1 source decomposition does not match the partition")

    classes = []
    for part in partitions:
        cls = part.class_of[var]
        try:
            classes.append([cls[s] for s in x.symbols])
        except KeyError as exc:
            raise InvalidInputError(f"symbol {exc} is outside the support") from None

    messages = []
    tables = [build_prefix_code({j: p for j, p in enumerate(cond)})
              for cond in decomp.conditionals]
    w = BitWriter()
    for s, k in zip(x.symbols, classes[0]):
        tables[k].encode_into(w, decomp.forward[s][1])
    messages.append(w.to_bits())

    for level in range(1, len(partitions)):
        rank_of, codes = _rank_codes(partitions[level - 1], partitions[level], var)
        w = BitWriter()
        for fi, ci in zip(classes[level - 1], classes[level]):
            mapped_ci, r = rank_of[fi]
            if mapped_ci != ci:
                raise NestingError("refinement map disagrees with the class chain")
            codes[ci].encode_into(w, r)
        messages.append(w.to_bits())
    return messages


def decode_bsi(
    messages,
    y: SymbolSequence,
    partitions: Sequence[ComponentPartition],
    decomps: Sequence[SourceDecomposition],
) -> SymbolSequence:
    """Exact source reconstruction from a message prefix and side information.

    ``messages`` must be M_1..M_i produced by :func:`encode_bsi_messages`;
    ``y`` is terminal i's side sequence. Decoded pairs are verified against
    the level-i joint support, so mismatched side information is detected.
    """
    messages = list(messages)
    level = len(messages)
    if not 1 <= level <= len(partitions):
        raise BindingError("message prefix does not match the partition chain")
    part_i = partitions[level - 1]
    yvar = y.variable
    if yvar not in part_i.variables:
        raise BindingError(f"side variable {yvar!r} not covered by level {level}")
    var = next(v for v in part_i.variables if v != yvar)

    cls_y = part_i.class_of[yvar]
    try:
        classes = [cls_y[s] for s in y.symbols]
    except KeyError as exc:
        raise DecodeError(f"side symbol {exc} is outside the support") from None

    for j in range(level - 1, 0, -1):
        fine, coarse = partitions[j - 1], partitions[j]
        rank_of, codes = _rank_codes(fine, coarse, var)
        table = refinement_table(fine, coarse, var)
        reader = BitReader(messages[j])
        finer = []
        for i, ci in enumerate(classes):
            try:
                r = codes[ci].decode_from(reader)
            except DecodeError as exc:
                raise DecodeError(f"message M{j + 1}, symbol {i}: {exc}") from None
            finer.append(table[ci][r])
        if reader.remaining:
            raise DecodeError(f"message M{j + 1} carries trailing bits")
        classes = finer

    decomp = decomps[0] if not isinstance(decomps, SourceDecomposition) else decomps
    tables = [build_prefix_code({j: p for j, p in enumerate(cond)})
              for cond in decomp.conditionals]
    reader = BitReader(messages[0])
    symbols = []
    for i, k in enumerate(classes):
        try:
            j = tables[k].decode_from(reader)
        except DecodeError as exc:
            raise DecodeError(f"message M1, symbol {i}: {exc}") from None
        symbols.append(decomp.inverse[(k, j)])
    if reader.remaining:
        raise DecodeError("message M1 carries trailing bits")

    order = part_i.variables
    for i, (xs, ys) in enumerate(zip(symbols, y.symbols)):
        pair = (xs, ys) if order[0] == var else (ys, xs)
        if pair not in part_i.support:
            raise DecodeError(
                f"decoded pair {pair!r} at position {i} is outside the joint support"
            )
    return SymbolSequence(var, tuple(symbols))


def helper_positions(n: int, gamma: float, seed: int):
    """Deterministic, evenly strided duty-cycle selection of symbol positions."""
    phase = (int(seed) % n) / n if n else 0.0
    return [
        floor((i + 1) * gamma + phase) - floor(i * gamma + phase) >= 1
        for i in range(n)
    ]


def encode_ak(
    x: SymbolSequence,
    y: SymbolSequence,
    book: Codebook,
    gamma: float,
    seed: int,
    epsilon: float = 0.1,
) -> EncodedBlock:
    """Helper-assisted encoding: k on a gamma fraction of positions, x always.

    The helper stream carries the component index, entropy-coded behind the
    same typicality gate as the multicast encoder, at positions selected by a
    deterministic stride derived from the seed. The source stream codes x
    conditionally on the component where one is available and with the
    marginal table elsewhere. gamma is quantized to Q16.16 so the selection
    survives a wire round trip.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    part = book.partition
    vx, vy, xs, ys, k_list = _paired_symbols(x, y, part)
    n = len(xs)
    gq = _q16(gamma) / 65536.0
    selected = helper_positions(n, gq, seed)

    ks = [k for k, sel in zip(k_list, selected) if sel]
    typical, k_bits = _encode_k(ks, book, epsilon)

    decomp = book.decomps[vx]
    tables = book.class_codes[vx]
    marginal = book.marginal_codes[vx]
    w = BitWriter()
    for s, k, sel in zip(xs, k_list, selected):
        if sel:
            tables[k].encode_into(w, decomp.forward[s][1])
        else:
            marginal.encode_into(w, s)
    x_bits = w.to_bits()

    streams = {"k": k_bits, "x": x_bits}
    rates = {name: b.nbits / n for name, b in streams.items()}
    return EncodedBlock(n, typical, epsilon, streams, rates, gamma=gq, seed=int(seed))


def decode_ak(block: EncodedBlock, book: Codebook) -> SymbolSequence:
    """Exact reconstruction of the source from a helper-assisted block."""
    missing = [s for s in ("k", "x") if s not in block.streams]
    if missing:
        raise DecodeError(f"insufficient streams, missing {missing}")
    if block.gamma is None or block.seed is None:
        raise DecodeError("helper block lacks its duty-cycle header")
    part = book.partition
    vx = part.variables[0]
    selected = helper_positions(block.n, block.gamma, block.seed)
    ks = decode_k_stream(block, book, count=sum(selected))

    decomp = book.decomps[vx]
    tables = book.class_codes[vx]
    marginal = book.marginal_codes[vx]
    reader = BitReader(block.streams["x"])
    symbols = []
    ki = iter(ks)
    for i, sel in enumerate(selected):
        try:
            if sel:
                k = next(ki)
                j = tables[k].decode_from(reader)
                symbols.append(decomp.inverse[(k, j)])
            else:
                symbols.append(marginal.decode_from(reader))
        except DecodeError as exc:
            raise DecodeError(f"stream x, symbol {i}: {exc}") from None
    if reader.remaining:
        raise DecodeError("stream x carries trailing bits")
    return SymbolSequence(vx, tuple(symbols))
