"""Tabulate CDI verdicts (closed-form rule and numeric fallback) over a set of Lambda measures."""
from snec.cdi import lambda_cdi, psi_growth_exponent, schweinsberg_partial_sums
from snec.measures import Beta, Dirac, LambdaMixture

CASES = {
    "Kingman a=2": LambdaMixture(2.0),
    "Dirac(0.3)": LambdaMixture(0, ((1.0, Dirac(0.3)),)),
    "Beta(1,1)": LambdaMixture(0, ((1.0, Beta(1, 1)),)),
    "Beta(2,2)": LambdaMixture(0, ((1.0, Beta(2, 2)),)),
    "Beta(0.5,1.5)": LambdaMixture(0, ((1.0, Beta(0.5, 1.5)),)),
    "Beta(0.9,1)": LambdaMixture(0, ((1.0, Beta(0.9, 1)),)),
    "Beta(1.1,1)": LambdaMixture(0, ((1.0, Beta(1.1, 1)),)),
    "Beta(1,3)": LambdaMixture(0, ((1.0, Beta(1, 3)),)),
    "Beta(1,1) + Dirac(0.5)": LambdaMixture(0, ((1.0, Beta(1, 1)), (1.0, Dirac(0.5)))),
    "Beta(0.5,1) + Beta(2,2)": LambdaMixture(0, ((1.0, Beta(0.5, 1)), (1.0, Beta(2, 2)))),
}


def main() -> None:
    print(f"{'measure':<26}{'rule':>14}{'numeric':>14}{'growth exp':>12}{'S_1e5':>12}")
    for name, lam in CASES.items():
        rule = lambda_cdi(lam)
        num = lambda_cdi(lam, numeric=True)
        beta, _ = psi_growth_exponent(lam)
        s = schweinsberg_partial_sums(lam, 10**5)[-1]
        rule_txt = rule.value.value if rule.method.name == "RULE" else "-"
        print(f"{name:<26}{rule_txt:>14}{num.value.value:>14}{beta:>12.3f}{s:>12.4g}")


if __name__ == "__main__":
    main()
