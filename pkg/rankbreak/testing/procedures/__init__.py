from rankbreak.testing.procedure import ChangePointProcedure, Procedure
from rankbreak.testing.procedures.cusum import CusumProcedure
from rankbreak.testing.procedures.wilcoxon import WilcoxonProcedure
from rankbreak.variance import VarianceConfig

PROCEDURES = {
    Procedure.WILCOXON: WilcoxonProcedure,
    Procedure.CUSUM: CusumProcedure,
}


def build_procedure(procedure: Procedure, variance_config: VarianceConfig | None = None) -> ChangePointProcedure:
    """Instantiates the concrete procedure for an enum member."""
    return PROCEDURES[procedure](variance_config)
