"""Published reference values for the four-variable demographic SVAR.

Variables are ordered (dcay, ds_adr, dns_adr, dg_gdp); structural shocks are
labelled TIT, SDP, DFL, DOS.  Matrices are as printed, to four decimals.
"""

import numpy as np

VARIABLES = ("DCA_Y", "DS_ADR", "DNS_ADR", "DG_GDP")
SHOCKS = ("TIT", "SDP", "DFL", "DOS")

# estimated AB system: A eps = B u with eps_3 = -0.0365 eps_1 + ..., eps_4 = -0.1424 eps_1 + ...
SYSTEM11_A = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0365, 0.0, 1.0, 0.0],
    [0.1424, 0.0, 0.0, 1.0],
])
SYSTEM11_B = np.array([
    [0.0959, 0.0, 0.0, 0.0],
    [0.0, 0.0143, -0.0052, 0.0],
    [0.0, 0.0, 0.0078, 0.0023],
    [0.0, 0.0, 0.0, 0.0385],
])
SYSTEM11_A_GRID = ["1 0 0 0", "0 1 0 0", "* 0 1 0", "* 0 0 1"]
SYSTEM11_B_GRID = ["* 0 0 0", "0 * * 0", "0 0 * *", "0 0 0 *"]

PHI0 = np.array([
    [0.0959, 0.0, 0.0, 0.0],
    [0.0, 0.0143, -0.0053, 0.0],
    [0.0035, 0.0, 0.0079, 0.0023],
    [0.0137, 0.0, 0.0, 0.0385],
])
PHI1 = np.array([
    [0.0130, -0.0102, 0.0132, 0.0112],
    [0.0007, 0.0140, -0.0096, -0.0030],
    [0.0027, 0.0004, 0.0074, 0.0026],
    [-0.0160, -0.0025, 0.0002, -0.0164],
])
PHI2 = np.array([
    [0.0000, -0.0106, 0.0167, 0.0024],
    [0.0003, 0.0132, -0.0132, -0.0033],
    [0.0024, 0.0009, 0.0068, 0.0022],
    [0.0050, -0.0004, -0.0005, 0.0061],
])
PSI_INF = np.array([
    [0.1614, 0.0069, 0.1662, 0.0595],
    [-0.0573, 0.0308, -0.2025, -0.0630],
    [0.0117, 0.0246, 0.0077, 0.0037],
    [0.0041, -0.0059, 0.0122, 0.0302],
])
# long-run effect of the DFL shock on growth as quoted in the discussion text
PSI_INF_QUOTED = {(3, 2): -0.0122}

FEVD_H10 = np.array([
    [69.92, 3.10, 23.98, 3.00],
    [2.81, 21.64, 69.31, 6.24],
    [12.85, 9.98, 69.56, 7.61],
    [20.80, 0.48, 0.22, 78.50],
])

RESIDUAL_CORR = np.array([
    [1.0, 0.00556, 0.39096, 0.33449],
    [0.00556, 1.0, -0.31024, -0.02763],
    [0.39096, -0.31024, 1.0, 0.38270],
    [0.33449, -0.02763, 0.38270, 1.0],
])
RESIDUAL_COV = np.array([
    [0.00919, 8.11e-6, 0.00033, 0.00131],
    [8.11e-6, 0.00023, -4.21e-5, -1.72e-5],
    [0.00033, -4.21e-5, 7.96e-5, 0.00014],
    [0.00131, -1.72e-5, 0.00014, 0.00167],
])


def recovered_A1() -> np.ndarray:
    """First-order VAR matrix implied by the printed impact and first-step responses."""
    return PHI1 @ np.linalg.inv(PHI0)


# contemporaneous and long-run covariances of (u1, u2') from the cointegrating regression
CCR_SIGMA = np.array([
    [0.0128, -0.0022, -0.0025, -0.0008],
    [-0.0022, 0.0236, 0.0050, 0.0006],
    [-0.0025, 0.0050, 0.0028, 0.0004],
    [-0.0008, 0.0006, 0.0004, 0.0016],
])
CCR_OMEGA = np.array([
    [0.0270, -0.0165, -0.0110, -0.0021],
    [-0.0165, 0.0873, 0.0229, 0.0029],
    [-0.0110, 0.0229, 0.0111, 0.0017],
    [-0.0021, 0.0029, 0.0017, 0.0021],
])
