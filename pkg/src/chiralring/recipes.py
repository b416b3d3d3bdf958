"""Canned CLI invocations that regenerate the data behind each figure panel."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Recipe:
    name: str
    panel: str
    filename: str
    argv: tuple[str, ...]
    check: str


_RECIPES = (
    Recipe("fig2a", "N=3 clockwise circulation, flux +pi/2", "fig2a.csv",
           ("evolve", "--n", "3", "--periods", "2"),
           "populations reach 1 on sites 2, 3, 1 at t = T, 2T, 3T (acceptance 1)"),
    Recipe("fig2b", "N=3 counterclockwise circulation, flux -pi/2", "fig2b.csv",
           ("evolve", "--n", "3", "--reverse", "--periods", "2"),
           "order 1 -> 3 -> 2 with unit fidelity (acceptance 4)"),
    Recipe("fig2c", "N=3 spectrum versus flux", "fig2c.csv",
           ("spectrum", "--n", "3", "--flux-range=-3.14159:3.14159:0.01"),
           "uniform spacing at flux = +-pi/2 (acceptance 2)"),
    Recipe("fig3b", "N=4 clockwise circulation", "fig3b.csv",
           ("evolve", "--n", "4", "--periods", "2"), "unit step fidelity (acceptance 1)"),
    Recipe("fig3c", "N=5 clockwise circulation", "fig3c.csv",
           ("evolve", "--n", "5", "--periods", "2"), "unit step fidelity (acceptance 1)"),
    Recipe("fig3d", "N=4 counterclockwise circulation", "fig3d.csv",
           ("evolve", "--n", "4", "--reverse", "--periods", "2"), "reversed order (acceptance 4)"),
    Recipe("fig3e", "N=5 counterclockwise circulation", "fig3e.csv",
           ("evolve", "--n", "5", "--reverse", "--periods", "2"), "reversed order (acceptance 4)"),
    Recipe("fig4a", "N=10 clockwise circulation", "fig4a.csv",
           ("evolve", "--n", "10", "--periods", "1"), "unit step fidelity (acceptance 1)"),
    Recipe("fig4b-n3", "average fidelity vs on-site disorder, N=3", "fig4b_n3.csv",
           ("disorder", "--n", "3", "--mode", "onsite", "--strengths", "0:1:0.1",
            "--realizations", "300", "--seed", "7"),
           "mean > 0.95 at W = 0.5 (acceptance 5a)"),
    Recipe("fig4b-n5", "average fidelity vs on-site disorder, N=5", "fig4b_n5.csv",
           ("disorder", "--n", "5", "--mode", "onsite", "--strengths", "0:1:0.1",
            "--realizations", "300", "--seed", "7"),
           "tolerance non-decreasing with N (acceptance 5c)"),
    Recipe("fig4b-n10", "average fidelity vs on-site disorder, N=10", "fig4b_n10.csv",
           ("disorder", "--n", "10", "--mode", "onsite", "--strengths", "0:1:0.1",
            "--realizations", "300", "--seed", "7"),
           "tolerance non-decreasing with N (acceptance 5c)"),
    Recipe("fig4c-n3", "average fidelity vs hopping disorder, N=3", "fig4c_n3.csv",
           ("disorder", "--n", "3", "--mode", "hopping", "--strengths", "0:0.5:0.05",
            "--realizations", "300", "--seed", "7"),
           "mean > 0.9 at dJ = 0.1 (acceptance 5b)"),
    Recipe("fig4c-n5", "average fidelity vs hopping disorder, N=5", "fig4c_n5.csv",
           ("disorder", "--n", "5", "--mode", "hopping", "--strengths", "0:0.5:0.05",
            "--realizations", "300", "--seed", "7"),
           "sensitivity grows with N (acceptance 5d)"),
    Recipe("fig4c-n10", "average fidelity vs hopping disorder, N=10", "fig4c_n10.csv",
           ("disorder", "--n", "10", "--mode", "hopping", "--strengths", "0:0.5:0.05",
            "--realizations", "300", "--seed", "7"),
           "worse than N=3 at dJ = 0.3 (acceptance 5d)"),
    Recipe("fig5-match", "drive amplitude matching at omega/J = 40, phi = pi/3", "fig5_match.json",
           ("floquet-match", "--omega-over-j", "40", "--phi", "pi/3"),
           "A/omega within 0.05 of 2.37 (acceptance 6)"),
    Recipe("fig5b", "driven vs effective, clockwise (phi = pi/3)", "fig5b.csv",
           ("floquet-compare", "--omega-over-j", "40", "--phi", "pi/3"),
           "stroboscopic deviation < 0.05 over one circulation period (acceptance 6)"),
    Recipe("fig5c", "driven vs effective, counterclockwise (phi = -pi/3)", "fig5c.csv",
           ("floquet-compare", "--omega-over-j", "40", "--phi=-pi/3"),
           "population order 1 -> 3 -> 2 (acceptance 6)"),
    Recipe("fig6a", "doublon circulation, theta = pi/6, U/J = 30", "fig6a.csv",
           ("anyon-evolve", "--u-over-j", "30", "--theta", "pi/6", "--t-end", "60"),
           "<n2> peaks >= 1.9 before <n3> (acceptance 8)"),
    Recipe("fig6b", "doublon circulation, theta = -pi/6, U/J = 30", "fig6b.csv",
           ("anyon-evolve", "--u-over-j", "30", "--theta=-pi/6", "--t-end", "60"),
           "order reversed (acceptance 8)"),
    Recipe("fig6c", "two-particle spectrum versus theta, U/J = 30", "fig6c.csv",
           ("anyon-spectrum", "--u-over-j", "30", "--thetas=-3.14159:3.14159:0.01"),
           "three doublon levels near U, three scattering levels near 0"),
    Recipe("fig6d", "theta_eq versus U/J", "fig6d.csv",
           ("anyon-thetaeq", "--u-range", "5:100:1"),
           "branches approach pi/6, pi/2, 5pi/6 (acceptance 9)"),
)


def figure_recipes() -> list[Recipe]:
    return list(_RECIPES)


def get_recipe(name: str) -> Recipe:
    for r in _RECIPES:
        if r.name == name:
            return r
    raise KeyError(f"unknown recipe {name!r}; choose from {[r.name for r in _RECIPES]}")
