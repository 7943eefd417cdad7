"""Generation-based random linear network coding over the 256-element field.

Streams are packetized, every packet in a generation carries a coding vector
over GF(256), intermediate nodes re-emit random linear combinations of
everything they have received so far, and terminals decode by Gaussian
elimination. Coefficients are drawn uniformly from the nonzero field elements
(a zero coefficient only wastes a transmission) by the session's seeded
generator, consumed round by round over edges in topological order, so runs
are exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Mapping, Sequence

import numpy as np

from .bitio import Bits
from .codec import EncodedBlock, _stream_names
from .errors import DeliveryError
from .netgraph import Network, independent_multicast_feasible, min_cut

_POLY = 0x11D  # primitive polynomial for GF(256)

_EXP = np.zeros(510, dtype=np.uint8)
_LOG = np.zeros(256, dtype=np.int32)
_v = 1
for _i in range(255):
    _EXP[_i] = _v
    _LOG[_v] = _i
    _v <<= 1
    if _v & 0x100:
        _v ^= _POLY
_EXP[255:510] = _EXP[:255]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(_EXP[int(_LOG[a]) + int(_LOG[b])])


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(256)")
    return int(_EXP[255 - int(_LOG[a])])


def gf_scale(row: np.ndarray, c: int) -> np.ndarray:
    """c * row, elementwise over GF(256)."""
    if c == 0:
        return np.zeros_like(row)
    out = np.zeros_like(row)
    nz = row != 0
    out[nz] = _EXP[_LOG[row[nz]] + _LOG[c]]
    return out


def gf_combine(rows: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Linear combination of the rows with the given coefficients."""
    logs = _LOG[rows].astype(np.int32) + _LOG[coeffs].astype(np.int32)[:, None]
    prod = _EXP[logs]
    prod[rows == 0] = 0
    prod[coeffs == 0, :] = 0
    return np.bitwise_xor.reduce(prod, axis=0)


def gf_rref(mat: np.ndarray, pivot_cols: int):
    """Reduced row echelon form over GF(256), pivoting on the leading columns.

    Returns (reduced copy, pivot column list); the rank is the pivot count.
    """
    m = mat.copy()
    rows = m.shape[0]
    r = 0
    pivots = []
    for c in range(pivot_cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = gf_scale(m[r], gf_inv(int(m[r, c])))
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if others.size:
            factors = m[others, c].copy()
            logs = _LOG[m[r]].astype(np.int32)[None, :] + _LOG[factors].astype(np.int32)[:, None]
            prod = _EXP[logs]
            prod[:, m[r] == 0] = 0
            m[others] ^= prod
        pivots.append(c)
        r += 1
    return m, pivots


@dataclass(eq=False)
class Packet:
    """One coded packet: a coding vector plus an equal-size payload vector."""

    generation: int
    vector: np.ndarray
    payload: np.ndarray


@dataclass(frozen=True)
class PacketizedStream:
    name: str
    payloads: tuple
    nbits: int
    packet_size: int


def packetize(streams: Mapping, packet_size: int) -> dict:
    """Split named bitstrings into fixed-size payloads, zero-padding the tail.

    Exact bit lengths are recorded so reassembly can strip the padding.
    """
    if packet_size < 1:
        raise ValueError("packet size must be at least 1 byte")
    if not streams:
        raise ValueError("no streams to packetize")
    out = {}
    for name, bits in streams.items():
        data = bits.data
        payloads = []
        for i in range(0, len(data), packet_size):
            chunk = data[i : i + packet_size]
            payloads.append(chunk + b"\x00" * (packet_size - len(chunk)))
        out[name] = PacketizedStream(name, tuple(payloads), bits.nbits, packet_size)
    return out


@dataclass
class Session:
    """One joint generation of packets injected at bound source nodes."""

    net: Network
    source_packets: tuple  # ((node, (payload bytes, ...)), ...) in generation order
    generation_size: int
    packet_size: int
    seed: int
    generation_id: int = 0

    def __post_init__(self):
        nodes = set(self.net.nodes)
        total = 0
        for node, payloads in self.source_packets:
            if node not in nodes:
                raise ValueError(f"unknown injection node {node!r}")
            for p in payloads:
                if len(p) != self.packet_size:
                    raise ValueError("payload size differs from the session packet size")
            total += len(payloads)
        if total != self.generation_size:
            raise ValueError("generation size must equal the total packet count")


@dataclass
class SessionResult:
    received: dict  # terminal -> list[Packet]
    audit: list = field(default_factory=list)  # {"round", "edge", "packets"}


def run_session(session: Session, rounds: int) -> SessionResult:
    """Simulate the network for a number of rounds.

    Per round every edge carries at most its capacity in packets; each carried
    packet is a fresh random combination of everything its tail node holds at
    that moment. Identical (session, seed) yields identical packets.
    """
    if rounds < 1:
        raise ValueError("at least one round required")
    rng = np.random.default_rng(session.seed)
    g = session.generation_size
    width = g + session.packet_size

    buffers: dict = {}
    idx = 0
    for node, payloads in session.source_packets:
        for p in payloads:
            row = np.zeros(width, dtype=np.uint8)
            row[idx] = 1
            row[g:] = np.frombuffer(p, dtype=np.uint8)
            buffers.setdefault(node, []).append(row)
            idx += 1

    topo_pos = {v: i for i, v in enumerate(session.net.topological_order())}
    edge_order = sorted(
        range(len(session.net.edges)),
        key=lambda ei: (topo_pos[session.net.edges[ei].tail], ei),
    )

    audit = []
    for rnd in range(rounds):
        for ei in edge_order:
            e = session.net.edges[ei]
            buf = buffers.get(e.tail)
            if not buf or e.cap == 0:
                continue
            rows = np.vstack(buf)
            head_buf = buffers.setdefault(e.head, [])
            for _ in range(e.cap):
                coeffs = rng.integers(1, 256, size=rows.shape[0], dtype=np.uint8)
                head_buf.append(gf_combine(rows, coeffs))
            audit.append({"round": rnd, "edge": f"{e.tail}->{e.head}", "packets": e.cap})

    received = {
        t: [
            Packet(session.generation_id, row[:g].copy(), row[g:].copy())
            for row in buffers.get(t, [])
        ]
        for t in session.net.terminals
    }
    return SessionResult(received, audit)


@dataclass
class GenerationDecode:
    rank: int
    packets: list | None  # source payloads in generation order when full rank

    @property
    def full(self) -> bool:
        return self.packets is not None


def decode_generation(received: Sequence[Packet], g: int) -> GenerationDecode:
    """Gaussian elimination over the received coding vectors.

    Returns the g source payloads exactly when the vectors span the full
    space, otherwise reports the achieved rank.
    """
    packets = list(received)
    if not packets:
        return GenerationDecode(0, None)
    gen_ids = {p.generation for p in packets}
    if len(gen_ids) != 1:
        raise ValueError("packets span multiple generations")
    sizes = {len(p.payload) for p in packets}
    if len(sizes) != 1:
        raise ValueError("inconsistent payload sizes")
    for p in packets:
        if len(p.vector) != g:
            raise ValueError("coding vector length differs from the generation size")

    mat = np.array(
        [np.concatenate([p.vector, p.payload]) for p in packets], dtype=np.uint8
    )
    reduced, pivots = gf_rref(mat, g)
    rank = len(pivots)
    if rank < g:
        return GenerationDecode(rank, None)
    return GenerationDecode(g, [reduced[i, g:].copy() for i in range(g)])


def deliver_multicast(
    net: Network,
    encoded: EncodedBlock,
    latent_binding: Mapping,
    seed: int,
    packet_size: int = 64,
    rate_tol: float = 0.25,
    margin_rounds: int = 2,
) -> dict:
    """Carry a block's streams through an expanded network to every terminal.

    ``latent_binding`` maps stream names to the latent source nodes of the
    (already expanded) network. The measured per-symbol stream rates must
    pass the independent-source subset conditions within ``rate_tol`` before
    any session runs; the session is then sized so every stream subset fits
    through its cut, plus ``margin_rounds`` extra rounds that absorb the
    rank-deficiency probability of random coding at tight cuts. Returns one
    bit-exact reassembled block per terminal.
    """
    if set(latent_binding) != set(encoded.streams):
        raise DeliveryError("latent binding does not cover exactly the block streams")
    names = _stream_names(encoded.streams)
    packed = packetize(encoded.streams, packet_size)

    rates = {latent_binding[name]: encoded.streams[name].nbits / encoded.n for name in names}
    gate = independent_multicast_feasible(net, rates, tol=rate_tol)
    if not gate.ok:
        failing = "; ".join(c.label for c in gate.failing())
        raise DeliveryError(f"stream rates unsupported by the network: {failing}")

    counts = {name: len(packed[name].payloads) for name in names}
    rounds = 1
    for mask in range(1, 1 << len(names)):
        subset = [names[i] for i in range(len(names)) if mask >> i & 1]
        total = sum(counts[s] for s in subset)
        if total == 0:
            continue
        nodes = {latent_binding[s] for s in subset}
        cut = min(min_cut(net, nodes, t).value for t in net.terminals)
        if cut == 0:
            raise DeliveryError(f"streams {subset} face a zero cut")
        rounds = max(rounds, ceil(total / cut))
    rounds += margin_rounds

    source_packets = tuple(
        (latent_binding[name], packed[name].payloads) for name in names
    )
    g = sum(counts.values())
    session = Session(net, source_packets, g, packet_size, seed)
    result = run_session(session, rounds)

    spans = {}
    start = 0
    for name in names:
        spans[name] = (start, start + counts[name])
        start += counts[name]

    out = {}
    for t in net.terminals:
        dec = decode_generation(result.received[t], g)
        if not dec.full:
            raise DeliveryError(f"terminal {t!r}: rank {dec.rank} of {g}")
        streams = {}
        for name in names:
            lo, hi = spans[name]
            nbits = packed[name].nbits
            raw = b"".join(bytes(p) for p in dec.packets[lo:hi])
            streams[name] = Bits(raw[: (nbits + 7) // 8], nbits)
        rates_t = {name: b.nbits / encoded.n for name, b in streams.items()}
        out[t] = EncodedBlock(
            encoded.n,
            encoded.typical,
            encoded.epsilon,
            streams,
            rates_t,
            encoded.gamma,
            encoded.seed,
        )
    return out
