import numpy as np
import pytest

from cubic.errors import DimensionError
from cubic.pauli import PauliWord, commutation_matrix, product


def test_single_qubit_commutation():
    x = PauliWord.from_qubits(1, x_qubits=[0])
    z = PauliWord.from_qubits(1, z_qubits=[0])
    y = x * z
    assert not x.commutes(z)
    assert not x.commutes(y)
    assert x.commutes(x)
    assert y.letters() == {0: "Y"}


def test_overlap_parity_decides_commutation():
    xx = PauliWord.from_qubits(3, x_qubits=[0, 1])
    zz = PauliWord.from_qubits(3, z_qubits=[0, 1])
    z0 = PauliWord.from_qubits(3, z_qubits=[0])
    assert xx.commutes(zz)
    assert not xx.commutes(z0)


def test_multiply_is_xor_and_self_inverse():
    a = PauliWord.from_qubits(4, x_qubits=[0, 2], z_qubits=[2, 3])
    b = PauliWord.from_qubits(4, x_qubits=[2], z_qubits=[1])
    assert (a * b).letters() == {0: "X", 1: "Z", 2: "Z", 3: "Z"}
    assert a * a == PauliWord.identity(4)


def test_symplectic_roundtrip():
    w = PauliWord.from_qubits(3, x_qubits=[1], z_qubits=[1, 2])
    v = w.to_symplectic()
    assert v.tolist() == [0, 1, 0, 0, 1, 1]
    assert PauliWord.from_symplectic(v) == w


def test_weight_support_and_restrict():
    w = PauliWord.from_qubits(5, x_qubits=[0, 4], z_qubits=[4, 2])
    assert w.weight() == 3
    assert w.support() == {0, 2, 4}
    assert w.restrict([0, 1]).letters() == {0: "X"}


def test_type_flags():
    assert PauliWord.from_qubits(2, x_qubits=[1]).is_x_type
    assert PauliWord.from_qubits(2, z_qubits=[1]).is_z_type
    assert not PauliWord.from_qubits(2, x_qubits=[0], z_qubits=[1]).is_x_type


@pytest.mark.parametrize(
    "build",
    [
        lambda: PauliWord.from_qubits(2, x_qubits=[0]).commutes(PauliWord.identity(3)),
        lambda: PauliWord.from_qubits(2, x_qubits=[2]),
        lambda: PauliWord.from_symplectic([1, 0, 1]),
        lambda: PauliWord(np.zeros(2), np.zeros(3)),
        lambda: PauliWord.identity(2).restrict([5]),
    ],
)
def test_dimension_errors(build):
    with pytest.raises(DimensionError):
        build()


def test_product_and_commutation_matrix():
    words = [
        PauliWord.from_qubits(2, x_qubits=[0]),
        PauliWord.from_qubits(2, z_qubits=[0]),
        PauliWord.from_qubits(2, z_qubits=[1]),
    ]
    assert product(words, 2).letters() == {0: "Y", 1: "Z"}
    assert commutation_matrix(words).tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 0]]


def test_words_hash_by_content():
    a = PauliWord.from_qubits(3, x_qubits=[1])
    b = PauliWord.from_qubits(3, x_qubits=[1])
    assert len({a, b}) == 1
