"""Reference values for the series coefficients of the orbit integrals.

Expands (1 - h sin^2(t)/2)^(-1/2) binomially and integrates each term with
the Beta function, at 40 significant digits. Output is the JSON fixture
read by the acceptance suite (crates/core/tests/acceptance.rs).

    python3 tools/gamma_oracle.py > crates/core/tests/data/series_oracle.json
"""

import json

import mpmath as mp

mp.mp.dps = 60
DIGITS = 40
MAX = 12


def sin_cos_integral(a, b):
    """Integral of sin^a cos^b over [0, pi/2]."""
    return mp.beta(mp.mpf(a + 1) / 2, mp.mpf(b + 1) / 2) / 2


def binomial_term(k):
    """Coefficient of (h s^2)^k in (1 - h s^2 / 2)^(-1/2)."""
    return mp.binomial(2 * k, k) / mp.mpf(8) ** k


def i_coeff(i, j, k):
    """Coefficient of h^(i+j+1+k) in I_{i,2j+1}, divided by pi."""
    value = 2 * mp.mpf(2) ** (j + 2) * binomial_term(k) * sin_cos_integral(2 * i + 2 * k, 2 * j + 2)
    return value / mp.pi


def j_coeff(i, j, k):
    """Coefficient of h^(i+j+1/2+k) in J_{i,2j}, divided by sqrt(2)."""
    value = mp.mpf(2) ** (j + mp.mpf(3) / 2) * binomial_term(k) * sin_cos_integral(2 * i + 2 * k, 2 * j + 1)
    return value / mp.sqrt(2)


def self_check():
    for i in range(3):
        for j in range(3):
            for k in range(3):
                a, b = 2 * i + 2 * k, 2 * j + 2
                q = mp.quad(lambda t: mp.sin(t) ** a * mp.cos(t) ** b, [0, mp.pi / 2])
                assert abs(q - sin_cos_integral(a, b)) < mp.mpf(10) ** -45


def main():
    self_check()
    rows = []
    for i in range(MAX + 1):
        for j in range(MAX + 1):
            for k in range(MAX + 1):
                rows.append({"kind": "I", "i": i, "j": j, "k": k, "value": mp.nstr(i_coeff(i, j, k), DIGITS)})
                if j >= 1:
                    rows.append({"kind": "J", "i": i, "j": j, "k": k, "value": mp.nstr(j_coeff(i, j, k), DIGITS)})
    body = ",\n".join("  " + json.dumps(r) for r in rows)
    print('{"digits": %d, "rows": [\n%s\n]}' % (DIGITS, body))


if __name__ == "__main__":
    main()
