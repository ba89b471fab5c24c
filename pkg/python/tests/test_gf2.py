import numpy as np
import pytest

from cubic import gf2
from cubic.errors import DimensionError


def _dense_rank(dense: np.ndarray) -> int:
    a = dense.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        hits = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not hits:
            continue
        a[[r, hits[0]]] = a[[hits[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


def test_pack_roundtrip_spans_word_boundary():
    bits = np.zeros(130, dtype=np.uint8)
    bits[[0, 63, 64, 129]] = 1
    packed = gf2.pack(bits)
    assert packed.shape == (3,)
    assert np.array_equal(gf2.unpack_rows(packed.reshape(1, -1), 130)[0], bits)


@pytest.mark.parametrize("shape", [(5, 7), (20, 70), (70, 20), (40, 130)])
def test_rank_matches_dense_elimination(rng, shape):
    for _ in range(5):
        dense = (rng.random(shape) < 0.3).astype(np.uint8)
        assert gf2.rank(gf2.BitMatrix.from_dense(dense)) == _dense_rank(dense)


def test_rank_of_empty_matrix():
    assert gf2.rank(gf2.BitMatrix.zeros(0, 10)) == 0
    assert gf2.rank(gf2.BitMatrix.zeros(4, 10)) == 0


def test_rank_nullity(rng):
    dense = (rng.random((30, 90)) < 0.2).astype(np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    kernel = gf2.kernel_basis(m)
    assert gf2.rank(m) + kernel.n_rows == m.n_cols
    assert not ((dense.astype(np.int64) @ kernel.to_dense().T.astype(np.int64)) % 2).any()
    assert gf2.rank(kernel) == kernel.n_rows


def test_row_reduce_is_reduced_echelon(rng):
    dense = (rng.random((12, 20)) < 0.4).astype(np.uint8)
    rref, pivots = gf2.row_reduce(gf2.BitMatrix.from_dense(dense))
    out = rref.to_dense()
    assert pivots == sorted(pivots)
    for i, col in enumerate(pivots):
        assert out[:, col].tolist() == [1 if j == i else 0 for j in range(out.shape[0])]
    assert not out[len(pivots):].any()


def test_in_rowspace(rng):
    dense = (rng.random((8, 40)) < 0.3).astype(np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    combo = (dense[1] ^ dense[4] ^ dense[6])
    assert gf2.in_rowspace(m, combo)
    # a fresh unit vector outside the span of 8 rows in 40 columns
    units = [np.eye(40, dtype=np.uint8)[c] for c in range(40)]
    outside = [p for p in units if not gf2.in_rowspace(m, p)]
    assert len(outside) >= 40 - gf2.rank(m)


def test_in_rowspace_length_mismatch():
    m = gf2.BitMatrix.from_dense([[1, 0, 1]])
    with pytest.raises(DimensionError):
        gf2.in_rowspace(m, [1, 0])


def test_solve_returns_coefficients(rng):
    dense = (rng.random((10, 25)) < 0.3).astype(np.uint8)
    m = gf2.BitMatrix.from_dense(dense)
    target = dense[2] ^ dense[7]
    c = gf2.solve(m, target)
    assert c is not None
    assert np.array_equal((c.astype(np.int64) @ dense.astype(np.int64)) % 2, target)


def test_solve_unreachable_target():
    m = gf2.BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    assert gf2.solve(m, [1, 0, 0]) is None


def test_rowspace_restricted_to():
    m = gf2.BitMatrix.from_dense([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
    inside = gf2.rowspace_restricted_to(m, [1, 0, 1, 0])
    assert inside.n_rows == 1
    assert inside.to_dense().tolist() == [[1, 0, 1, 0]]
    assert gf2.rowspace_restricted_to(m, [1, 1, 1, 1]).n_rows == 3


def test_reducer_tracks_span():
    r = gf2.Reducer(4)
    assert r.add(gf2.pack([1, 1, 0, 0]))
    assert r.add(gf2.pack([0, 1, 1, 0]))
    assert not r.add(gf2.pack([1, 0, 1, 0]))
    assert r.contains(gf2.pack([1, 0, 1, 0]))
    assert not r.contains(gf2.pack([0, 0, 0, 1]))
    assert len(r) == 2


def test_from_supports_cancels_repeats():
    m = gf2.BitMatrix.from_supports([[0, 2, 2], [1]], 3)
    assert m.to_dense().tolist() == [[1, 0, 0], [0, 1, 0]]
    with pytest.raises(DimensionError):
        gf2.BitMatrix.from_supports([[3]], 3)


def test_parity_products():
    a = gf2.BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    b = gf2.BitMatrix.from_dense([[1, 0, 0], [1, 1, 1]])
    assert gf2.parity_products(a, b).to_dense().tolist() == [[1, 0], [0, 0]]


def test_stack_rejects_mismatched_columns():
    with pytest.raises(DimensionError):
        gf2.BitMatrix.stack([gf2.BitMatrix.zeros(1, 3), gf2.BitMatrix.zeros(1, 4)], 3)


def test_dump():
    assert gf2.BitMatrix.from_dense([[1, 0], [0, 1]]).dump() == "10\n01"
