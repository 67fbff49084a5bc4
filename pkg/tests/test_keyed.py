import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caqwbh import keyed, walk
from caqwbh.errors import InvalidAlpha, InvalidKey
from caqwbh.hashing import hash_bits, postprocess
from caqwbh.keyed import MacKey, load_key, mac, prng_fill, prng_next, prng_seed, save_key
from caqwbh.walk import WalkState, make_coin


def e0(n):
    v = np.zeros(n, dtype=complex)
    v[0] = 1
    return v


@pytest.fixture
def plain_key():
    return MacKey.create(e0(32), np.zeros(32, dtype=np.uint8))


class TestMac:
    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 1), max_size=200))
    def test_reduces_to_hash(self, params256, msg):
        key = MacKey.create(e0(32), np.zeros(32, dtype=np.uint8))
        assert mac(params256, key, msg) == hash_bits(params256, msg)

    def test_tag_length(self, params256, plain_key):
        assert mac(params256, plain_key, "1011").nbits == 256

    def test_key2_diffusion(self, params256):
        rng = np.random.default_rng(5)
        dist = []
        for _ in range(1000):
            key1 = MacKey.generate(params256, rng).key1
            key2 = rng.integers(0, 2, 64).astype(np.uint8)
            msg = rng.integers(0, 2, 256)
            t1 = mac(params256, MacKey.create(key1, key2), msg)
            key2[rng.integers(64)] ^= 1
            t2 = mac(params256, MacKey.create(key1, key2), msg)
            dist.append(t1.hamming(t2))
        assert abs(np.mean(dist) - 128) < 3 * np.std(dist, ddof=1) / np.sqrt(1000)

    def test_key1_changes_tag(self, params256, plain_key):
        rng = np.random.default_rng(1)
        other = MacKey.generate(params256, rng)
        assert mac(params256, other, "0101") != mac(params256, plain_key, "0101")

    def test_padded_key2(self, params256):
        # 40-bit key2: one full block, then 8 key bits with Hadamard on the rest.
        key2 = np.random.default_rng(2).integers(0, 2, 40).astype(np.uint8)
        c0, c1 = make_coin(params256.theta1), make_coin(params256.theta2)
        s = WalkState(5)
        walk.step(s, key2[:32], c0, c1)
        ctab, stab = walk.coin_tables(c0, c1)
        sel = np.full(32, 2, dtype=np.uint8)
        sel[:8] = key2[32:]
        walk.evolve_selectors(s, sel, ctab, stab)
        walk.step(s, np.ones(32), c0, c1)
        expected = postprocess(walk.probabilities(s), 8)
        assert mac(params256, MacKey.create(e0(32), key2), np.ones(32)).data == expected

    def test_invalid_key1(self, params256):
        with pytest.raises(InvalidKey):
            mac(params256, MacKey.create(np.ones(32), np.zeros(32)), "1")

    def test_short_key2(self, params256):
        with pytest.raises(InvalidKey):
            mac(params256, MacKey.create(e0(32), np.zeros(31)), "1")

    def test_key_file_roundtrip(self, params256, tmp_path):
        key = MacKey.generate(params256, np.random.default_rng(11), key2_bits=45)
        path = tmp_path / "key.json"
        save_key(path, params256, key)
        params, loaded = load_key(path)
        assert params == params256
        assert loaded == key
        assert mac(params, loaded, "1") == mac(params256, key, "1")

    def test_key_file_renormalization_checked(self, params256, tmp_path):
        key = MacKey.generate(params256, np.random.default_rng(11))
        path = tmp_path / "key.json"
        save_key(path, params256, key)
        text = path.read_text().replace(key.key1 and f"{key.key1[0].real:.17g}", "0.9", 1)
        path.write_text(text)
        with pytest.raises(InvalidKey):
            load_key(path)


class TestPrng:
    def test_seed_state(self, params256):
        st_ = prng_seed(params256, e0(32), np.zeros(32))
        assert abs(st_.state.norm() - 1) < 1e-15

    def test_unnormalized_alpha(self, params256):
        with pytest.raises(InvalidAlpha):
            prng_seed(params256, np.ones(32), np.zeros(32))

    def test_first_output_is_single_step(self, params256):
        block = np.random.default_rng(4).integers(0, 2, 32).astype(np.uint8)
        out = prng_next(prng_seed(params256, e0(32), block))
        s = walk.step(WalkState(5), block, make_coin(params256.theta1), make_coin(params256.theta2))
        expected = np.unpackbits(np.frombuffer(postprocess(walk.probabilities(s), 8), dtype=np.uint8))
        np.testing.assert_array_equal(out, expected)

    def test_feedback_uses_last_block_bits(self, params256):
        gen = prng_seed(params256, e0(32), np.zeros(32))
        first = prng_next(gen)
        np.testing.assert_array_equal(gen.next_block, first[-32:])
        state = gen.state.copy()
        second = prng_next(gen)
        walk.step(state, first[-32:], make_coin(params256.theta1), make_coin(params256.theta2))
        expected = np.unpackbits(np.frombuffer(postprocess(walk.probabilities(state), 8), dtype=np.uint8))
        np.testing.assert_array_equal(second, expected)

    def test_lengths(self, params256):
        gen = prng_seed(params256)
        assert sum(prng_next(gen).size for _ in range(5)) == 5 * 256

    def test_fill(self, params256):
        a = prng_seed(params256)
        before = a.state.copy()
        assert prng_fill(a, 0).size == 0
        assert a.state == before
        b = prng_seed(params256)
        np.testing.assert_array_equal(prng_fill(a, 256), prng_next(b))
        c, d = prng_seed(params256), prng_seed(params256)
        out = prng_fill(c, 3 * 256 + 1)
        ref = np.concatenate([prng_next(d) for _ in range(4)])
        assert out.size == 3 * 256 + 1
        np.testing.assert_array_equal(out, ref[: out.size])
        assert c.state == d.state

    def test_determinism(self, params256):
        block = np.arange(32) % 3 == 0
        a = prng_fill(prng_seed(params256, None, block), 5000)
        b = prng_fill(prng_seed(params256, None, block), 5000)
        np.testing.assert_array_equal(a, b)

    def test_chaining(self, params256):
        rng = np.random.default_rng(8)
        fractions = []
        for _ in range(200):
            alpha = MacKey.generate(params256, rng).key1
            block = rng.integers(0, 2, 32).astype(np.uint8)
            a = prng_seed(params256, alpha, block)
            prng_next(a)
            flipped = block.copy()
            flipped[rng.integers(32)] ^= 1
            b = prng_seed(params256, alpha, flipped)
            prng_next(b)
            fractions.append(np.mean(prng_next(a) != prng_next(b)))
        assert abs(np.mean(fractions) - 0.5) < 0.02

    def test_basis_start_ignores_upper_half_of_init_block(self, params256):
        # From e_0 the first step only reaches positions < N/2 before its last coin,
        # so those control bits are the only ones that matter.
        base = prng_fill(prng_seed(params256, None, np.zeros(32)), 512)
        for j in (0, 15, 16, 31):
            block = np.zeros(32, dtype=np.uint8)
            block[j] = 1
            changed = np.any(prng_fill(prng_seed(params256, None, block), 512) != base)
            assert changed == (j < 16)

    def test_monobit(self, params256):
        bits = prng_fill(prng_seed(params256, None, np.zeros(32)), 10**6)
        assert 0.495 <= bits.mean() <= 0.505


def test_load_alpha(params256, tmp_path):
    key = MacKey.generate(params256, np.random.default_rng(3))
    save_key(tmp_path / "k.json", params256, key)
    assert keyed.load_alpha(tmp_path / "k.json") == key.key1
