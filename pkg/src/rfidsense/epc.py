"""Tag memory with sensor data embedded in the 96-bit identifier field.

Identifier layout, six 16-bit words, MSB first:

    word 0   [15:8] scheme tag 0xA5     [7:0] node id
    word 1   [15:0] sequence counter, wraps at 2**16
    word 2   [15:10] reserved, zero     [9:0] ADC code
    word 3-5 fixed filler

EPC bank image, in word order: stored CRC-16, protocol control word,
then the six identifier words. The protocol control word carries the
identifier length in words in its top five bits. The CRC is the air
interface checksum: polynomial 0x1021, register preset to all ones,
transmitted complemented, most significant bit first. Verification of
a block with its trailing checksum leaves the register at 0x1D0F.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

CRC16_POLY = 0x1021
CRC16_PRESET = 0xFFFF
CRC16_RESIDUE = 0x1D0F

SCHEME_TAG = 0xA5
EPC_WORDS = 6
FILLER_WORDS = (0x0000, 0x0000, 0x0000)

NVM_TOTAL_BITS = 2176
RESERVED_BITS = 64
EPC_BANK_BITS = 128
TID_BITS = 96

# Allocation class byte leading the tag identification bank.
TID_CLASS_BYTE = 0xE2


class EpcFormatError(ValueError):
    """Identifier words do not match the scheme layout."""


class TagMemoryError(ValueError):
    """Tag memory content is inconsistent or does not fit its bank."""


def bits_from_bytes(data: bytes) -> Iterator[int]:
    """Iterate the bits of a byte string, most significant bit first."""
    for byte in data:
        for shift in range(7, -1, -1):
            yield (byte >> shift) & 1


def crc16_register(bits: Iterable[int]) -> int:
    """Shift-register CRC over a bit sequence, before complementing."""
    reg = CRC16_PRESET
    for bit in bits:
        feedback = ((reg >> 15) & 1) ^ bit
        reg = (reg << 1) & 0xFFFF
        if feedback:
            reg ^= CRC16_POLY
    return reg


def crc16(bits: Iterable[int]) -> int:
    """Checksum in transmitted form: the complemented register."""
    return crc16_register(bits) ^ 0xFFFF


def crc16_check(bits_with_crc: Iterable[int]) -> bool:
    """Validate a block followed by its transmitted checksum."""
    return crc16_register(bits_with_crc) == CRC16_RESIDUE


@dataclass(frozen=True)
class Epc96:
    """A 96-bit identifier in wire form, as six 16-bit words."""

    words: tuple[int, int, int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.words) != EPC_WORDS:
            raise EpcFormatError(f"expected {EPC_WORDS} words, got {len(self.words)}")
        for w in self.words:
            if not 0 <= w <= 0xFFFF:
                raise EpcFormatError(f"word {w:#x} outside 16 bits")

    def to_bytes(self) -> bytes:
        out = bytearray()
        for w in self.words:
            out += w.to_bytes(2, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Epc96":
        if len(data) != EPC_WORDS * 2:
            raise EpcFormatError(f"expected {EPC_WORDS * 2} bytes, got {len(data)}")
        words = tuple(
            int.from_bytes(data[i : i + 2], "big") for i in range(0, len(data), 2)
        )
        return cls(words)  # type: ignore[arg-type]

    @property
    def scheme_tag(self) -> int:
        return self.words[0] >> 8

    @property
    def node_id(self) -> int:
        return self.words[0] & 0xFF

    @property
    def seq(self) -> int:
        return self.words[1]

    @property
    def code(self) -> int:
        return self.words[2] & 0x03FF


def encode_epc(node_id: int, seq: int, code: int) -> Epc96:
    """Pack node id, sequence counter and ADC code into identifier words.

    The sequence counter wraps modulo 2**16; node id and code must fit
    their fields exactly.
    """
    if not 0 <= node_id <= 0xFF:
        raise ValueError(f"node_id must fit one byte, got {node_id}")
    if not 0 <= code <= 0x03FF:
        raise ValueError(f"ADC code must fit ten bits, got {code}")
    words = (
        (SCHEME_TAG << 8) | node_id,
        seq & 0xFFFF,
        code,
    ) + FILLER_WORDS
    return Epc96(words)


def decode_epc(epc: Epc96) -> tuple[int, int, int]:
    """Unpack (node_id, seq, code), rejecting foreign identifier schemes."""
    if epc.scheme_tag != SCHEME_TAG:
        raise EpcFormatError(
            f"unknown scheme tag {epc.scheme_tag:#04x}, expected {SCHEME_TAG:#04x}"
        )
    if epc.words[2] & 0xFC00:
        raise EpcFormatError(f"reserved bits set in word 2: {epc.words[2]:#06x}")
    return epc.node_id, epc.seq, epc.code


def _pc_word(epc_words: int) -> int:
    # length in words occupies the top five bits of the protocol control word
    return (epc_words & 0x1F) << 11


@dataclass(frozen=True)
class TagMemory:
    """The four NVM banks of the tag, each a byte string."""

    reserved: bytes
    epc_bank: bytes
    tid: bytes
    user: bytes

    def __post_init__(self) -> None:
        for name, bank in self.banks():
            if len(bank) % 2 != 0:
                raise TagMemoryError(f"{name} bank must be a whole number of words")
        total_bits = 8 * sum(len(bank) for _, bank in self.banks())
        if total_bits > NVM_TOTAL_BITS:
            raise TagMemoryError(
                f"banks need {total_bits} bits, NVM holds {NVM_TOTAL_BITS}"
            )

    def banks(self) -> tuple[tuple[str, bytes], ...]:
        return (
            ("RESERVED", self.reserved),
            ("EPC", self.epc_bank),
            ("TID", self.tid),
            ("USER", self.user),
        )

    @classmethod
    def fresh(
        cls,
        reserved_bits: int = RESERVED_BITS,
        epc_bank_bits: int = EPC_BANK_BITS,
        tid_bits: int = TID_BITS,
        total_bits: int = NVM_TOTAL_BITS,
    ) -> "TagMemory":
        """Blank memory; the user bank takes whatever budget remains."""
        user_bits = total_bits - reserved_bits - epc_bank_bits - tid_bits
        if user_bits < 0:
            raise TagMemoryError("bank sizes exceed the NVM budget")
        for n in (reserved_bits, epc_bank_bits, tid_bits, user_bits):
            if n % 16 != 0:
                raise TagMemoryError("bank sizes must be multiples of 16 bits")
        tid = bytes((TID_CLASS_BYTE,)) + bytes(tid_bits // 8 - 1)
        return cls(
            reserved=bytes(reserved_bits // 8),
            epc_bank=bytes(epc_bank_bits // 8),
            tid=tid,
            user=bytes(user_bits // 8),
        )


def commit(mem: TagMemory, epc: Epc96) -> TagMemory:
    """Write an identifier into the EPC bank with fresh PC and CRC words.

    Both the protocol control word and the stored checksum are
    recomputed on every write, so the bank always verifies after a
    commit. Raises :class:`TagMemoryError` when the bank is too small.
    """
    payload = _pc_word(EPC_WORDS).to_bytes(2, "big") + epc.to_bytes()
    needed = 2 + len(payload)
    if len(mem.epc_bank) < needed:
        raise TagMemoryError(
            f"EPC bank holds {len(mem.epc_bank)} bytes, need {needed}"
        )
    stored_crc = crc16(bits_from_bytes(payload))
    image = stored_crc.to_bytes(2, "big") + payload
    image += bytes(len(mem.epc_bank) - len(image))
    return TagMemory(mem.reserved, image, mem.tid, mem.user)


def verify(mem: TagMemory) -> bool:
    """Residue check of PC + identifier against the stored checksum."""
    image = mem.epc_bank[: 4 + EPC_WORDS * 2]
    reordered = image[2:] + image[:2]
    return crc16_check(bits_from_bytes(reordered))


def read_epc(mem: TagMemory) -> Epc96:
    """Extract the identifier the way a reader would, checksum first."""
    if not verify(mem):
        raise TagMemoryError("EPC bank fails its checksum")
    return Epc96.from_bytes(mem.epc_bank[4 : 4 + EPC_WORDS * 2])


def dump(mem: TagMemory) -> str:
    """Hex dump, one bank per line, big-endian 16-bit words."""
    lines = []
    for name, bank in mem.banks():
        words = " ".join(
            f"{int.from_bytes(bank[i:i + 2], 'big'):04X}"
            for i in range(0, len(bank), 2)
        )
        lines.append(f"{name:<8} {words}".rstrip())
    return "\n".join(lines)
