from src.special.errors import (
    StieltjesError, ParameterError, CoefficientError, PoleError, FactorizationError,
    ConvergenceError, CrossCheckError, NodeError, InfeasibleError, SingularSystemError,
)
from src.special.contfrac import SFraction, JFraction, contract, s_convergent, j_convergent
from src.special.orthopoly import Family, FamilyTag, RecurrenceCoeffs, MeasureDescriptor, family_coeffs
from src.special.moments import MomentSequence, MomentKind
from src.special.quadrature import QuadRule, KronrodRule, gauss_rule, kronrod_rule
from src.special.electro import ChargeSystem, EquilibriumResult, equilibrium
from src.special.elliptic import EllipticContext

__all__ = [
    'StieltjesError', 'ParameterError', 'CoefficientError', 'PoleError', 'FactorizationError',
    'ConvergenceError', 'CrossCheckError', 'NodeError', 'InfeasibleError', 'SingularSystemError',
    'SFraction', 'JFraction', 'contract', 's_convergent', 'j_convergent',
    'Family', 'FamilyTag', 'RecurrenceCoeffs', 'MeasureDescriptor', 'family_coeffs',
    'MomentSequence', 'MomentKind', 'QuadRule', 'KronrodRule', 'gauss_rule', 'kronrod_rule',
    'ChargeSystem', 'EquilibriumResult', 'equilibrium', 'EllipticContext',
]
