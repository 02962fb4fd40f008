from vtimeline.prng import MASK64, Xoshiro256StarStar, derive_stream_seed, fnv1a64, splitmix64


def test_splitmix64_deterministic():
    s1, out1 = splitmix64(42)
    s2, out2 = splitmix64(42)
    assert (s1, out1) == (s2, out2)
    assert 0 <= out1 <= MASK64


def test_xoshiro_first_outputs_from_known_state():
    # With state [1,2,3,4] the first two outputs are derivable by hand:
    # rotl(2*5,7)*9 = 11520, then s1 becomes 0 so the next output is 0.
    gen = Xoshiro256StarStar(0)
    gen._s = [1, 2, 3, 4]
    assert gen.next_u64() == 11520
    assert gen.next_u64() == 0


def test_streams_repeat_for_same_seed():
    a = [Xoshiro256StarStar(7).next_u64() for _ in range(5)]
    b = [Xoshiro256StarStar(7).next_u64() for _ in range(5)]
    assert a == b
    c = [Xoshiro256StarStar(8).next_u64() for _ in range(5)]
    assert a != c


def test_randbelow_range_and_determinism():
    gen = Xoshiro256StarStar(123)
    draws = [gen.randbelow(10) for _ in range(200)]
    assert all(0 <= d < 10 for d in draws)
    assert len(set(draws)) == 10  # all residues reached over 200 draws


def test_shuffle_is_a_permutation():
    gen = Xoshiro256StarStar(5)
    items = list(range(30))
    gen.shuffle(items)
    assert sorted(items) == list(range(30))
    again = list(range(30))
    Xoshiro256StarStar(5).shuffle(again)
    assert items == again


def test_sample_without_replacement_distinct():
    gen = Xoshiro256StarStar(9)
    picked = gen.sample_without_replacement(list(range(50)), 12)
    assert len(picked) == 12
    assert len(set(picked)) == 12
    assert gen.sample_without_replacement([1, 2], 5) in ([1, 2], [2, 1])


def test_fnv1a64_known_vector():
    # Published FNV-1a test vector: "a" -> 0xaf63dc4c8601ec8c
    assert fnv1a64("a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"") == 0xCBF29CE484222325


def test_derive_stream_seed_separates_tokens():
    assert derive_stream_seed(1, "video-a") != derive_stream_seed(1, "video-b")
    assert derive_stream_seed(1, "video-a") == derive_stream_seed(1, "video-a")
