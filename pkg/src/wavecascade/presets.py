"""The worked example: a widening step, a straight connector and a bend."""
import numpy as np

from .geometry import (AdmittanceProfile, AdmittanceSegment, ConformalBlock, ExpSCMap,
                       OuterPolygonMap, StraightMap)

BETA_EXAMPLE = 0.5 + 0.5j
SC_PREVERTEX = 0.008740


def step_map():
    a = SC_PREVERTEX
    return ExpSCMap(
        A=0.6 / np.pi, alphas=(0.85, 1.15, 1.15, 0.85), b=(1.0, 0.05, 0.05, 1.0),
        c=(1.0, 0.05, 0.05, 1.0), prevertices=(-1.0, -a, a, 1.0), w0=2.0, z0=1 + 0.2j,
    )


def bend_map():
    # wedge 0.3pi..0.7pi; |A| = 1.5 * 0.1501 gives the 0.6 / 0.2*sqrt(2) end widths
    return OuterPolygonMap(
        A=1.5 * 0.1501 * np.exp(-0.75j * np.pi), alpha=7 / 4, phi1=0.3 * np.pi, phi2=0.7 * np.pi,
        a=-0.4632, w0=-7.0, z0=4.4485 + 0.2j,
    )


def example_admittance(beta=BETA_EXAMPLE, shape="quintic"):
    if beta == 0:
        return AdmittanceProfile((), shape)
    return AdmittanceProfile((AdmittanceSegment(-2.0, -1.0, 1.0, 2.0, complex(beta)),), shape)


def example_blocks(beta=BETA_EXAMPLE, shape="quintic"):
    """The two curved blocks (step on [-5, 5], bend on [-7, 7])."""
    prof = example_admittance(beta, shape)
    return (
        ConformalBlock(step_map(), prof, (-5.0, 5.0), "step"),
        ConformalBlock(bend_map(), prof, (-7.0, 7.0), "bend"),
    )


def connector_length(step: ConformalBlock, bend: ConformalBlock):
    """Axial gap between the right end of the step and the left end of the bend."""
    z1 = step.map.point(complex(step.u_range[1], 0.0))
    z2 = bend.map.point(complex(bend.u_range[0], 0.0))
    return float(abs(z2 - z1))


def straight_block(width, length, beta=0.0, name="straight"):
    """Straight block in strip coordinates; u spans length/width."""
    L = length / width
    prof = AdmittanceProfile(())
    if beta != 0:
        prof = AdmittanceProfile((AdmittanceSegment(0.2 * L, 0.35 * L, 0.65 * L, 0.8 * L, complex(beta)),))
    return ConformalBlock(StraightMap(width), prof, (0.0, L), name)
