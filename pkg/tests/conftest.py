import pytest

from snec.measures import Beta, Dirac, LambdaMixture, ProbLaw, SnecSpec, SpeciesComponent

LAM, P0, Q0, A_S = 2.0, 0.6, 0.4, 0.5


def kingman_in_kingman(a_s: float = 1.0, a_g: float = 1.0) -> SnecSpec:
    return SnecSpec(a_s, a_g)


def dirac_species(lam: float = LAM, p0: float = P0, q0: float = Q0, a_s: float = A_S) -> SnecSpec:
    """nu_s = lam * delta_(p0, delta_q0): the stored weight is lam * p0^2."""
    return SnecSpec(a_s, 0.0, LambdaMixture(), (SpeciesComponent(lam * p0 * p0, ProbLaw.dirac(p0), ProbLaw.dirac(q0)),))


def gene_dirac(w: float = 1.5, q0: float = 0.3) -> SnecSpec:
    return SnecSpec(0.0, 0.0, LambdaMixture(0.0, ((w, Dirac(q0)),)))


def gene_uniform() -> SnecSpec:
    return SnecSpec(0.0, 0.0, LambdaMixture(0.0, ((1.0, Beta(1.0, 1.0)),)))


def species_dirac_dirac() -> SnecSpec:
    return SnecSpec(0.0, 0.0, LambdaMixture(), (SpeciesComponent(0.8, ProbLaw.dirac(0.5), ProbLaw.dirac(0.7)),))


def species_beta_beta() -> SnecSpec:
    return SnecSpec(0.0, 0.0, LambdaMixture(), (SpeciesComponent(1.0, ProbLaw.beta(2, 2), ProbLaw.beta(2, 2)),))


def full_mixture() -> SnecSpec:
    return SnecSpec(
        0.5,
        1.0,
        LambdaMixture(0.0, ((0.2, Dirac(0.5)), (1.0, Beta(1.0, 1.0)))),
        (
            SpeciesComponent(1.0, ProbLaw.beta(2, 2), ProbLaw.dirac(0.3)),
            SpeciesComponent(0.5, ProbLaw.dirac(0.6), ProbLaw.beta(2, 3)),
        ),
    )


def bs_species_kingman_genes() -> SnecSpec:
    return SnecSpec(0.0, 1.0, LambdaMixture(), (SpeciesComponent(1.0, ProbLaw.beta(1, 1), ProbLaw.dirac(0.0)),))


def beta22_species_kingman_genes() -> SnecSpec:
    return SnecSpec(0.0, 1.0, LambdaMixture(), (SpeciesComponent(1.0, ProbLaw.beta(2, 2), ProbLaw.dirac(0.0)),))


SPEC_GRID = {
    "kingman": kingman_in_kingman,
    "gene_dirac": gene_dirac,
    "gene_uniform": gene_uniform,
    "species_dirac_dirac": species_dirac_dirac,
    "species_beta_beta": species_beta_beta,
    "full_mixture": full_mixture,
}


@pytest.fixture(params=sorted(SPEC_GRID))
def grid_spec(request) -> SnecSpec:
    return SPEC_GRID[request.param]()


def ten_element_state():
    """The ten-element nested partition used throughout the combinatorics tests."""
    from snec.partitions import NestedPartition

    return NestedPartition.parse("{1,5,7}{2,4,8,10}{3,6,9} / {1}{2,4}{3}{5,7}{6,9}{8}{10}")


def intro_state():
    """Three species of two singleton genes each."""
    from snec.partitions import NestedPartition

    return NestedPartition.from_counts((2, 2, 2))
