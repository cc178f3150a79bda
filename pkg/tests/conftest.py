import numpy as np
import pytest

from fibonav import anyon, meshes, navigator, symmetry


@pytest.fixture(scope="session")
def ytilde():
    return anyon.build_y_tilde()


@pytest.fixture(scope="session")
def group(ytilde):
    return ytilde.group


@pytest.fixture(scope="session")
def std_y_group():
    elements = symmetry.closure(symmetry.standard_generators("Y"))
    return symmetry.SymmetryGroup(elements)


@pytest.fixture(scope="session")
def dict7(ytilde):
    return navigator.build_dictionary(ytilde, 7)


@pytest.fixture(scope="session")
def dict14(ytilde):
    return navigator.build_dictionary(ytilde, 14)


@pytest.fixture(scope="session")
def dict16(ytilde):
    return navigator.build_dictionary(ytilde, 16)


@pytest.fixture(scope="session")
def mesh_p0(ytilde):
    return meshes.build_p(0, ytilde)


@pytest.fixture(scope="session")
def mesh_p1(ytilde, dict16):
    return meshes.build_p(1, ytilde, dict16)


@pytest.fixture(scope="session")
def mesh_p2(ytilde, dict16):
    return meshes.build_p(2, ytilde, dict16)


@pytest.fixture(scope="session")
def mesh_q0(ytilde, dict16):
    return meshes.build_q(0, ytilde, dict16)


@pytest.fixture(scope="session")
def mesh_q1(ytilde, dict16):
    return meshes.build_q(1, ytilde, dict16)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240311)
