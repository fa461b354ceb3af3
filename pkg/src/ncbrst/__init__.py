"""Noncommutative BRST reduction for quiver path algebras, with exact checks."""
__version__ = "0.1.0"

from .ncalg import (Arrow, Quiver, AlgebraContext, NCElement, TensorElement, Derivation,
                    build_path_algebra, double_quiver, localize, tensor_permute, cycle)
from .dbracket import (BracketTable, HamiltonianData, standard_table, free_product, double_bracket,
                       single_bracket, triple_bracket, verify_axioms, check_hamiltonian,
                       cotangent_moment, commutator_membership, charge_differential)
from .complexes import (DGAPresentation, presentation, shafarevich, chevalley_eilenberg, brst,
                        gauge_quiver, contraction_check, eta_zero_map)
from .repfun import rep_algebra, trace, induced_poisson, gl_derivations, verify_rep_laws
from .homology import (weight_slice, betti, invariant_subcomplex, lie_cohomology,
                       verify_decomposition, phi_psi, diagonal_check, multisym_invariants)
from .report import Report, PASS, FAIL, FINDING
