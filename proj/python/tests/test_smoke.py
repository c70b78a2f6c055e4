import os

import numpy as np
import pytest
from scipy.sparse.linalg import lsmr as scipy_lsmr

import dynsparse as ds

SOURCE_DIR = os.environ.get("DYNSPARSE_SOURCE_DIR", os.path.join(os.path.dirname(__file__), "..", ".."))


def small_config(solver="ias"):
    cfg = ds.Config.from_yaml(
        """
schema_version: 1
problem:
  haar_levels: 2
  phantom:
    image_size: 16
    n_frames: 4
    mask_radius: 7.5
    disc: {center: [7.5, 7.5], radius: 7.0, intensity: 0.5}
    block: {size: 4, intensity: 1.0, start: [6, 3], end: [6, 9]}
solver:
  ias: {max_outer_iters: 3}
  admm: {max_outer_iters: 3}
outputs: {record_timing: false}
"""
    )
    cfg.solver = solver
    return cfg


def test_default_config_file_matches_builtin():
    shipped = ds.Config.load(os.path.join(SOURCE_DIR, "configs", "default.yaml"))
    assert shipped.hash == ds.Config().hash


def test_config_errors():
    with pytest.raises(ds.ConfigError):
        ds.Config.from_yaml("noise: {sigma: 0.1}")
    with pytest.raises(ds.ConfigError):
        ds.Config.from_yaml("schema_version: 1\nbogus: 3")
    cfg = ds.Config()
    with pytest.raises(ds.ConfigError):
        cfg.solver = "newton"


def test_phantom_values():
    cfg = ds.Config()
    x = ds.phantom(cfg)
    assert x.shape == (16, 32, 32)
    assert set(np.unique(x)) <= {0.0, 0.5, 1.5}
    assert ds.phantom_mask(cfg).dtype == bool


def test_lsmr_matches_scipy():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((30, 12))
    b = rng.standard_normal(30)
    x, info = ds.lsmr(a, b, damp=0.5, atol=1e-14, btol=1e-14, max_iters=500)
    ref = scipy_lsmr(a, b, damp=0.5, atol=1e-14, btol=1e-14, maxiter=500)[0]
    assert np.linalg.norm(x - ref) <= 1e-10 * np.linalg.norm(ref)
    assert info["stop_reason"] in {"converged_atol_btol", "exact_solution"}


def test_lsmr_complex_normal_equations():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((10, 6)) + 1j * rng.standard_normal((10, 6))
    b = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    x, _ = ds.lsmr(a, b, damp=1.0, atol=1e-14, btol=1e-14, max_iters=200)
    ref = np.linalg.solve(a.conj().T @ a + np.eye(6), a.conj().T @ b)
    assert x.dtype == np.complex128
    assert np.allclose(x, ref, rtol=0, atol=1e-10)


def test_haar_round_trip_and_orthogonality():
    img = np.random.default_rng(5).standard_normal((8, 16))
    c = ds.haar_analysis(img, 2)
    assert np.isclose(np.linalg.norm(c), np.linalg.norm(img))
    assert np.allclose(ds.haar_synthesis(c, 8, 16, 2), img, atol=1e-13)


def test_theta_update_and_soft_threshold():
    z = np.array([0.0, 0.3, -2.0])
    eta, s = 1e-3, 0.5
    theta = ds.theta_update(z, eta, s)
    assert theta[0] == s * eta
    residual = 1 / s - eta / theta - z**2 / (2 * theta**2)
    assert np.max(np.abs(residual)) < 1e-10
    v = np.array([3 + 4j, 0.5j])
    out = ds.soft_threshold(v, 1.0)
    assert np.allclose(out, [2.4 + 3.2j, 0.0])


def test_ias_recovers_sparse_vector():
    rng = np.random.default_rng(6)
    f = rng.standard_normal((20, 40)) / np.sqrt(20)
    truth = np.zeros(40)
    truth[[4, 21]] = [1.0, -1.0]
    r = ds.ias(f * 100, f @ truth * 100, eta=1e-8, theta_scale=1e-2, max_outer_iters=100, outer_tol=1e-10,
               inner_atol=1e-12, inner_btol=1e-12, inner_max_iters=500)
    assert np.linalg.norm(r["z"] - truth) < 1e-2
    assert np.all(np.diff(r["gibbs_energy"]) <= 1e-10 * np.abs(r["gibbs_energy"][:-1]))


def test_admm_matches_proximal_gradient():
    rng = np.random.default_rng(10)
    f = rng.standard_normal((30, 10))
    b = rng.standard_normal(30)
    mu = 0.3 * np.max(np.abs(f.T @ b))
    step = 1.0 / np.linalg.norm(f, 2) ** 2
    x = np.zeros(10)
    for _ in range(20000):
        v = x - step * f.T @ (f @ x - b)
        x = np.sign(v) * np.maximum(np.abs(v) - step * mu, 0.0)
    for dual in ("verbatim", "standard"):
        a = ds.admm(f, b, mu1=mu, rho=1.0, dual_update=dual, max_outer_iters=5000, eps_abs=1e-12, eps_rel=1e-12,
                    inner_atol=1e-14, inner_btol=1e-14)
        assert a["converged"]
        assert np.linalg.norm(a["x"] - x) <= 1e-6 * np.linalg.norm(x)


def test_ssim_identity_and_range():
    img = np.random.default_rng(7).standard_normal((20, 20))
    assert ds.ssim(img, img) == 1.0
    noisy = img + 0.5 * np.random.default_rng(8).standard_normal((20, 20))
    assert -1.0 < ds.ssim(noisy, img) < 1.0


@pytest.mark.parametrize("solver", ["ias", "admm", "lsq"])
def test_reconstruct_is_deterministic(solver):
    cfg = small_config(solver)
    problem = ds.Problem(cfg)
    first = ds.reconstruct(cfg, problem)
    second = ds.reconstruct(cfg)
    assert first["reconstruction"].shape == (4, 16, 16)
    assert np.array_equal(first["reconstruction"], second["reconstruction"])
    assert first["run_id"] == second["run_id"]
    assert 0.0 < first["ssim_t_avg"] <= 1.0
    assert (first["theta_image"] is not None) == (solver == "ias")


def test_problem_operator_adjointness():
    cfg = small_config()
    cfg_text = cfg.to_json()
    assert '"kind":"tomo"' in cfg_text
    p = ds.Problem(cfg)
    m, n = p.shape
    rng = np.random.default_rng(9)
    x = rng.standard_normal(n)
    y = rng.standard_normal(m)
    assert np.isclose(np.dot(p.forward(x), y), np.dot(x, p.adjoint(y)), rtol=1e-12)
