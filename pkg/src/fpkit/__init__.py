"""fpkit: exact computation with finitely presented groups.

Submodules:

- ``words``          free-group word algebra and the word text syntax
- ``intlinalg``      Smith normal form, abelian invariants, integer solving
- ``presentations``  the presentation DSL, H1, Tietze moves, free products
- ``foldings``       Stallings foldings for subgroups of free groups
- ``amalgams``       normal forms in amalgams of free groups
- ``enumeration``    Todd-Coxeter coset enumeration with certificates
- ``machines``       Turing machines and modular machine compilation
- ``constructions``  witness groups, H1 killing, universal central
                     extensions, collection, and the machine-to-group
                     triviality reduction
- ``cli``            the command-line interface
"""

from .words import (Alphabet, Generator, GeneratorMap, Word, commutator,
                    cyclic_reduce, invert, multiply, parse_word, reduce_word,
                    substitute)
from .intlinalg import (AbelianInvariants, IntMatrix, SmithDecomposition,
                        abelian_invariants, smith_normal_form, solve_integer)
from .presentations import (Presentation, abelianization_matrix, apply_tietze,
                            emit, free_product, h1, parse, quotient_add_relators)
from .foldings import SubgroupGraph, fold
from .amalgams import AmalgamSpec, NormalForm, build_witness_amalgam, is_trivial_word, normal_form
from .enumeration import (CosetTable, EnumerationResult, enumerate_cosets, order,
                          permutation_rep)
from .machines import TuringMachine, compile_modular, parse_machine, run_modular, simulate
from .constructions import (CollectionResult, WitnessOptions, amalgam_join, kill_h1,
                            lambda_words, push_marked_right, step4_identity,
                            tm_to_group, uce_morphism, universal_central_extension,
                            verify_class_P, witness)

__version__ = "0.1.0"
