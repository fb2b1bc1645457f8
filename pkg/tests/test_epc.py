"""Identifier packing, tag memory banks and the air-interface checksum.

The checksum implementation is cross-checked against an independent
polynomial long-division reference (crc_reference.py) on random
inputs, alongside the published check value for "123456789".
"""

import random

import pytest
from hypothesis import given, strategies as st

from crc_reference import crc16_longdiv, crc16_register_longdiv
from rfidsense.epc import (
    CRC16_RESIDUE,
    EPC_WORDS,
    SCHEME_TAG,
    Epc96,
    EpcFormatError,
    TagMemory,
    TagMemoryError,
    bits_from_bytes,
    commit,
    crc16,
    crc16_check,
    crc16_register,
    decode_epc,
    dump,
    encode_epc,
    read_epc,
    verify,
)


def bits_of(data: bytes) -> list:
    return list(bits_from_bytes(data))


class TestCrc16:
    def test_check_value(self):
        """Standard check input for this polynomial and preset."""
        assert crc16_register(bits_of(b"123456789")) == 0x29B1
        assert crc16(bits_of(b"123456789")) == 0xD64E

    def test_empty_message(self):
        assert crc16_register([]) == 0xFFFF
        assert crc16([]) == 0x0000

    def test_matches_long_division_reference(self):
        rng = random.Random(1234)
        for _ in range(300):
            n = rng.randrange(0, 200)
            bits = [rng.randrange(2) for _ in range(n)]
            assert crc16_register(bits) == crc16_register_longdiv(bits)
            assert crc16(bits) == crc16_longdiv(bits)

    def test_residue(self):
        rng = random.Random(99)
        for _ in range(50):
            msg = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 30)))
            checked = crc16(bits_of(msg))
            full = bits_of(msg) + [(checked >> s) & 1 for s in range(15, -1, -1)]
            assert crc16_register(full) == CRC16_RESIDUE
            assert crc16_check(full)

    def test_detects_single_bit_flips(self):
        msg = bits_of(b"\xa5\x01\x00\x07\x03\x19")
        checked = crc16(msg)
        full = msg + [(checked >> s) & 1 for s in range(15, -1, -1)]
        for i in range(len(full)):
            corrupted = list(full)
            corrupted[i] ^= 1
            assert not crc16_check(corrupted), f"flip at bit {i} went unnoticed"

    def test_detects_short_bursts(self):
        """Any error burst no longer than 16 bits is caught."""
        rng = random.Random(5)
        msg = [rng.randrange(2) for _ in range(80)]
        checked = crc16(msg)
        full = msg + [(checked >> s) & 1 for s in range(15, -1, -1)]
        for start in range(0, len(full) - 16):
            for width in (2, 9, 16):
                pattern = [rng.randrange(2) for _ in range(width - 2)]
                burst = [1] + pattern + [1]
                corrupted = list(full)
                for j, b in enumerate(burst):
                    corrupted[start + j] ^= b
                assert not crc16_check(corrupted)

    @given(st.lists(st.integers(0, 1), max_size=120))
    def test_register_equals_reference(self, bits):
        assert crc16_register(bits) == crc16_register_longdiv(bits)


class TestIdentifier:
    def test_encode_layout(self):
        epc = encode_epc(1, 7, 793)
        assert epc.words == (0xA501, 0x0007, 0x0319, 0, 0, 0)
        assert epc.scheme_tag == SCHEME_TAG
        assert epc.node_id == 1
        assert epc.seq == 7
        assert epc.code == 793

    def test_round_trip(self):
        rng = random.Random(42)
        for _ in range(500):
            node_id = rng.randrange(256)
            seq = rng.randrange(1 << 16)
            code = rng.randrange(1024)
            assert decode_epc(encode_epc(node_id, seq, code)) == (
                node_id,
                seq,
                code,
            )

    def test_sequence_wraps(self):
        assert encode_epc(1, 0x1_0005, 0).seq == 5
        assert encode_epc(1, -1, 0).seq == 0xFFFF

    def test_field_bounds(self):
        with pytest.raises(ValueError):
            encode_epc(256, 0, 0)
        with pytest.raises(ValueError):
            encode_epc(1, 0, 1024)

    def test_decode_rejects_foreign_scheme(self):
        with pytest.raises(EpcFormatError):
            decode_epc(Epc96((0x1701, 0, 0, 0, 0, 0)))

    def test_decode_rejects_reserved_bits(self):
        with pytest.raises(EpcFormatError):
            decode_epc(Epc96((0xA501, 0, 0x0400, 0, 0, 0)))

    def test_bytes_round_trip(self):
        epc = encode_epc(9, 1000, 512)
        assert Epc96.from_bytes(epc.to_bytes()) == epc
        with pytest.raises(EpcFormatError):
            Epc96.from_bytes(b"\x00" * 11)


class TestTagMemory:
    def test_fresh_bank_sizes(self):
        mem = TagMemory.fresh()
        assert len(mem.reserved) * 8 == 64
        assert len(mem.epc_bank) * 8 == 128
        assert len(mem.tid) * 8 == 96
        assert len(mem.user) * 8 == 1888
        assert sum(len(b) for _, b in mem.banks()) * 8 == 2176
        assert mem.tid[0] == 0xE2

    def test_commit_and_read_back(self):
        mem = commit(TagMemory.fresh(), encode_epc(1, 7, 793))
        assert verify(mem)
        epc = read_epc(mem)
        assert decode_epc(epc) == (1, 7, 793)

    def test_commit_image_layout(self):
        mem = commit(TagMemory.fresh(), encode_epc(1, 7, 793))
        # stored CRC computed over PC + identifier by the reference
        payload = bytes.fromhex("3000a50100070319000000000000")
        expect = crc16_longdiv(bits_of(payload))
        assert expect == 0x7A2D
        assert mem.epc_bank[:2] == expect.to_bytes(2, "big")
        assert mem.epc_bank[2:4] == b"\x30\x00"  # 6 words in the top 5 bits
        assert mem.epc_bank[4:16] == payload[2:]

    def test_verify_catches_corruption(self):
        mem = commit(TagMemory.fresh(), encode_epc(1, 7, 793))
        bank = bytearray(mem.epc_bank)
        bank[5] ^= 0x01
        broken = TagMemory(mem.reserved, bytes(bank), mem.tid, mem.user)
        assert not verify(broken)
        with pytest.raises(TagMemoryError):
            read_epc(broken)

    def test_commit_needs_room(self):
        small = TagMemory.fresh(epc_bank_bits=112)
        with pytest.raises(TagMemoryError):
            commit(small, encode_epc(1, 0, 0))

    def test_nvm_budget_enforced(self):
        with pytest.raises(TagMemoryError):
            TagMemory.fresh(reserved_bits=2176, epc_bank_bits=128)
        with pytest.raises(TagMemoryError):
            TagMemory(b"\x00" * 200, b"\x00" * 16, b"\x00" * 12, b"\x00" * 100)

    def test_odd_byte_banks_rejected(self):
        with pytest.raises(TagMemoryError):
            TagMemory(b"\x00" * 3, b"", b"", b"")

    def test_dump_format(self):
        mem = commit(TagMemory.fresh(), encode_epc(1, 7, 793))
        lines = dump(mem).splitlines()
        assert lines[0] == "RESERVED 0000 0000 0000 0000"
        assert lines[1] == (
            "EPC      7A2D 3000 A501 0007 0319 0000 0000 0000"
        )
        assert lines[2].startswith("TID      E200 0000")
        assert lines[3].startswith("USER     0000")
        assert len(lines[3].split()) == 1 + 1888 // 16
