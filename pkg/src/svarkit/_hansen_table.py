"""Upper-tail quantiles of Hansen's Lc under the null of cointegration.

Generated by scripts/gen_hansen_table.py (reps=40000, nobs=1000,
seed=19920101).  Keys are (number of I(1) regressors, deterministic terms).
"""

UPPER_TAIL = [0.001, 0.005, 0.01, 0.025, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.975, 0.99]

CRITICAL_VALUES = {
    (1, 'c'): [1.3544, 1.0324, 0.9016, 0.7043, 0.5680, 0.4987, 0.4464, 0.3765, 0.3263, 0.2906, 0.2623, 0.2170, 0.1824, 0.1542, 0.1290, 0.1052, 0.0807, 0.0654, 0.0557, 0.0461],
    (2, 'c'): [1.5730, 1.1889, 1.0295, 0.8435, 0.6918, 0.6114, 0.5555, 0.4780, 0.4232, 0.3808, 0.3471, 0.2940, 0.2520, 0.2158, 0.1840, 0.1537, 0.1208, 0.1008, 0.0861, 0.0723],
    (3, 'c'): [1.7455, 1.3475, 1.2058, 0.9929, 0.8371, 0.7461, 0.6819, 0.5940, 0.5303, 0.4811, 0.4409, 0.3773, 0.3269, 0.2836, 0.2440, 0.2061, 0.1646, 0.1383, 0.1187, 0.1014],
    (4, 'c'): [1.8943, 1.5050, 1.3361, 1.1092, 0.9487, 0.8529, 0.7894, 0.6931, 0.6268, 0.5741, 0.5309, 0.4612, 0.4030, 0.3532, 0.3080, 0.2627, 0.2122, 0.1783, 0.1544, 0.1324],
    (5, 'c'): [2.0563, 1.6229, 1.4488, 1.2388, 1.0686, 0.9708, 0.8963, 0.7953, 0.7232, 0.6674, 0.6207, 0.5444, 0.4809, 0.4248, 0.3729, 0.3211, 0.2622, 0.2221, 0.1933, 0.1644],
    (1, 'ct'): [1.4774, 1.1266, 0.9514, 0.7668, 0.6292, 0.5511, 0.4957, 0.4251, 0.3741, 0.3352, 0.3040, 0.2540, 0.2161, 0.1844, 0.1562, 0.1302, 0.1023, 0.0851, 0.0738, 0.0616],
    (2, 'ct'): [1.7093, 1.2868, 1.1318, 0.9241, 0.7685, 0.6848, 0.6234, 0.5409, 0.4825, 0.4390, 0.4016, 0.3430, 0.2954, 0.2563, 0.2195, 0.1848, 0.1479, 0.1233, 0.1061, 0.0906],
    (3, 'ct'): [1.8113, 1.4610, 1.2858, 1.0754, 0.9112, 0.8183, 0.7511, 0.6598, 0.5927, 0.5415, 0.4987, 0.4316, 0.3768, 0.3302, 0.2859, 0.2438, 0.1963, 0.1668, 0.1445, 0.1230],
    (4, 'ct'): [1.9891, 1.5800, 1.4084, 1.1949, 1.0297, 0.9348, 0.8679, 0.7711, 0.6997, 0.6436, 0.5974, 0.5226, 0.4612, 0.4069, 0.3574, 0.3078, 0.2525, 0.2142, 0.1876, 0.1605],
    (5, 'ct'): [2.1512, 1.7392, 1.5666, 1.3322, 1.1571, 1.0578, 0.9836, 0.8778, 0.8018, 0.7444, 0.6949, 0.6130, 0.5451, 0.4855, 0.4288, 0.3718, 0.3075, 0.2622, 0.2293, 0.1988],
    (1, 'ctt'): [1.4964, 1.1118, 0.9739, 0.7909, 0.6547, 0.5799, 0.5249, 0.4505, 0.3996, 0.3607, 0.3293, 0.2785, 0.2391, 0.2059, 0.1763, 0.1484, 0.1179, 0.0981, 0.0841, 0.0711],
    (2, 'ctt'): [1.6483, 1.3195, 1.1680, 0.9440, 0.7992, 0.7175, 0.6593, 0.5747, 0.5158, 0.4718, 0.4349, 0.3742, 0.3258, 0.2842, 0.2457, 0.2091, 0.1682, 0.1417, 0.1215, 0.1036],
    (3, 'ctt'): [1.8215, 1.5103, 1.3279, 1.1221, 0.9593, 0.8684, 0.8014, 0.7049, 0.6387, 0.5876, 0.5427, 0.4714, 0.4155, 0.3656, 0.3195, 0.2728, 0.2223, 0.1893, 0.1646, 0.1417],
    (4, 'ctt'): [2.0276, 1.6516, 1.4904, 1.2600, 1.0969, 0.9923, 0.9207, 0.8200, 0.7425, 0.6886, 0.6418, 0.5648, 0.5016, 0.4458, 0.3924, 0.3394, 0.2781, 0.2381, 0.2096, 0.1806],
    (5, 'ctt'): [2.3198, 1.8115, 1.6502, 1.4059, 1.2302, 1.1188, 1.0436, 0.9376, 0.8597, 0.7982, 0.7462, 0.6600, 0.5902, 0.5288, 0.4698, 0.4085, 0.3378, 0.2913, 0.2558, 0.2225],
}
