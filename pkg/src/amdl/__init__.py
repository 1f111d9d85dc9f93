"""amdl: a desk-scale simulation lab for active multi-distribution learning."""

from .core import (ContractViolation, FeatureSpace, Hypothesis, HypothesisClass,
                   LabeledDistribution, MDLInstance, RandomizedHypothesis,
                   agreement_labels, best_nu, disagreement, disagreement_region,
                   induced_distribution, imputed_distribution, instance_from_dict,
                   instance_to_dict, load_instance, loss, max_disagreement,
                   mixture_distribution, save_instance, worst_loss)
from .complexity import (ComplexityValue, DisagreementProfile,
                         disagreement_coefficient, disagreement_profile,
                         star_number, star_number_unqualified, theta_max,
                         vc_dimension)
from .oracles import (DegenerateAgreementRegion, OracleSet, QueryLedger,
                      SamplerFamily, imputed_family, induced_family,
                      plain_family, surrogate_family)
from .hedge import (HedgeResult, HedgeState, SolverConfig, hedge_step,
                    hyperparams, mdl_hedge_vc, naive_erm_baseline,
                    reward_estimate, weighted_erm)
from .active import (ActiveRunResult, EpochSchedule, active_large_eps,
                     active_small_eps, regime_dispatch)
from .rpu import (AbstainingClassifier, RpuReport, active_dist_free, batch_size,
                  passive_rpu_mdl, robust_rpu_learn, rpu_report,
                  threshold_majority)
from .families import (FamilySpec, SeparationReport, gen_agnostic_lb,
                       gen_example1, gen_prop1, gen_random, gen_star_lb,
                       kl_bernoulli, kl_bernoulli_integral, verify_separation)
from .harness import (ALGORITHMS, PROFILES, RunConfig, TrialRecord,
                      records_to_csv, report, run_trials, sweep, sweep_to_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
