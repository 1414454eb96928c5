from .base import NamedBuilder, ReductionArtifact
from .sat import Sat31Instance, brute_force_sat, random_sat31
from .tournament import (reduce_c2, reduce_epsilon, reduce_restricted, reduce_sat_to_tournament,
                         sat_assignment_from_solution, sat_solution_from_assignment)
from .blowup import congestion_blowup
from .mcc import (MccInstance, brute_force_clique, mcc_clique_from_solution, mcc_congested_extension,
                  mcc_solution_from_clique, random_mcc, reduce_mcc)
