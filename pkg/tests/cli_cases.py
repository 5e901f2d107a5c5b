"""One small, fast invocation per subcommand, shared by the CLI, schema and determinism tests."""

from __future__ import annotations

CASES = {
    "solve": ["solve", "--theta", "1/2", "--psi", "power:0.1,0.5", "--phi", "zero", "--rho", "none",
              "--n-max", "10"],
    "survey": ["survey", "--psi", "power:0.1,0.5", "--samples", "5", "--n-max", "200", "--seed", "3"],
    "hypotheses": ["hypotheses", "--psi", "power:0.1,0.5", "--phi", "sin:1/3,1/6", "--J", "0.1,0.9",
                   "--n-trunc", "200"],
    "lattice-count": ["lattice-count", "--p", "11", "--Q", "16", "--L", "2", "--J", "1/5,9/10",
                      "--qset", "random:3", "--phi", "sin:1/3,1/6", "--oracle", "--seed", "5"],
    "discrepancy": ["discrepancy", "--alpha", "sqrt(2)", "--L", "100", "--J", "0,0.5", "--H-max", "5"],
    "weyl": ["weyl", "--a", "1/4", "--phi", "psshift:1/4,1", "--n", "2000", "--J", "0.3,0.45",
             "--intervals", "0.2,0.5;0,0.1", "--vdc-h", "1"],
    "ps-scan": ["ps-scan", "--a1", "1", "--a2", "2", "--b2", "0", "--alpha-range", "1.2,1.9,4",
                "--n-max", "500", "--seed", "1"],
    "ps-quotients": ["ps-quotients", "--alpha", "5/2", "--n-floor", "100", "--n-max", "200",
                     "--height", "3"],
    "ps-check": ["ps-check", "--a1", "1", "--a2", "3", "--b2", "1", "--alpha", "1.6,sqrt(2)",
                 "--n-max", "300"],
}
