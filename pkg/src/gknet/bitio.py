"""Minimal MSB-first bitstring buffers used by the block codecs."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DecodeError


@dataclass(frozen=True)
class Bits:
    """An immutable bitstring: packed bytes plus an exact bit count."""

    data: bytes
    nbits: int

    def __post_init__(self):
        if self.nbits < 0 or len(self.data) != (self.nbits + 7) // 8:
            raise ValueError("byte payload does not match the bit count")
        # normalize: trailing pad bits must be zero
        if self.nbits % 8:
            last = self.data[-1]
            mask = 0xFF << (8 - self.nbits % 8) & 0xFF
            if last & ~mask & 0xFF:
                object.__setattr__(
                    self, "data", self.data[:-1] + bytes([last & mask])
                )

    def __len__(self) -> int:
        return self.nbits


EMPTY_BITS = Bits(b"", 0)


class BitWriter:
    def __init__(self):
        self._bytes = bytearray()
        self._acc = 0
        self._nacc = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0 or value < 0 or (nbits < value.bit_length()):
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nacc += nbits
        while self._nacc >= 8:
            self._nacc -= 8
            self._bytes.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1

    def write_bit(self, bit: int) -> None:
        self.write(bit, 1)

    def pad_to_byte(self) -> None:
        if self._nacc:
            self.write(0, 8 - self._nacc)

    @property
    def bit_length(self) -> int:
        return len(self._bytes) * 8 + self._nacc

    def to_bits(self) -> Bits:
        nbits = self.bit_length
        data = bytes(self._bytes)
        if self._nacc:
            data += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return Bits(data, nbits)


class BitReader:
    def __init__(self, bits: Bits):
        self._data = bits.data
        self._nbits = bits.nbits
        self._pos = 0

    def read_bit(self) -> int:
        if self._pos >= self._nbits:
            raise DecodeError("bitstream exhausted")
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit

    def read(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value

    @property
    def remaining(self) -> int:
        return self._nbits - self._pos
