GOLDEN_SCENARIO = """# Golden scenario: small, seeded and fast; two runs give identical reports.

[scenario]
name = golden
seed = 20261019
kernel = hilbert
suite = 3
lambda_count = 12
lambda_span = 0.01
json_out = reports/golden.json
csv_out = reports/golden.csv

[grid]
dim = 1
cells = 32

[functions]
f = steps(4)
b = sign
w = power(-0.5)
mu = power(0.5)
lambda = power(-0.5)
p = 2

[young]
phi = phi_eps(0.5)
Psi = phi_llogl
Lambda = 16

[checks]
run = fs, orlicz_fs, weakcomm, asp, bloom, duality, fact, submultiplicativity,
      osc_llogl, adjoint_sparse, oscillation, tbf_measure, key_lemma, t_domination, domination

[ceilings]
fs = 10
weakcomm = 100
asp = 100
bloom = 100
osc_llogl = 10
adjoint_sparse = 10
"""

SMOKE_SCENARIO = """[scenario]
name = smoke
seed = 1

[grid]
cells = 16

[checks]
run = fs, duality
"""
