"""Sparse complex Laplacian estimation from noisy power measurements.

Thin Python layer over the C++ core. Typical flow::

    import gridtopo as gt

    g, b_tilde, lines = gt.gen_grid(6, extra_edges=2, seed=1)
    meas, sigma2 = gt.simulate(g, b_tilde, model="dlpf", n_samples=400, snr_db=30)
    report = gt.estimate(meas)
    print(gt.fscore(b_tilde, report.b_hat_tilde))

Matrices cross the boundary as numpy arrays. Input errors raise
``gridtopo.SchemaError`` (a ``ValueError``); numerical failures raise
``gridtopo.NumericalError`` (an ``ArithmeticError``).
"""

from ._gridtopo import (  # noqa: F401
    AlmReport,
    MeasurementSet,
    NumericalError,
    QuadraticForm,
    SchemaError,
    build_model,
    convert,
    estimate,
    eval_objective,
    fscore,
    gen_grid,
    grad_objective,
    is_laplacian,
    load_case,
    magnitude_ratio,
    mse,
    oracle_solve,
    project_feasible,
    project_to_laplacian,
    read_measurements,
    resolve_lambda,
    save_case,
    simulate,
    snr_of,
    support_edges,
    threshold_offdiag,
    write_measurements,
)

__all__ = [
    "AlmReport",
    "MeasurementSet",
    "NumericalError",
    "QuadraticForm",
    "SchemaError",
    "build_model",
    "convert",
    "estimate",
    "eval_objective",
    "fscore",
    "gen_grid",
    "grad_objective",
    "is_laplacian",
    "load_case",
    "magnitude_ratio",
    "mse",
    "oracle_solve",
    "project_feasible",
    "project_to_laplacian",
    "read_measurements",
    "resolve_lambda",
    "save_case",
    "simulate",
    "snr_of",
    "support_edges",
    "threshold_offdiag",
    "write_measurements",
]
