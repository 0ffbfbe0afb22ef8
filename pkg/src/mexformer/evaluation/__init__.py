"""Leave-one-subject-out protocols, label maps and recognition metrics"""

from .confusion import ConfusionMatrix
from .labels import CDE_CLASSES, SDE_CLASSES, ProtocolKind, cde_label_map, sde_label
from .metrics import accuracy, accuracy_and_macro_f1, absent_classes, degenerate_classes, uar, uf1
from .protocol import (
    Fold,
    FoldResult,
    ProtocolReport,
    ProtocolSpec,
    apply_protocol,
    loso_splits,
    run_protocol,
    training_fold_runner,
)
from .report import load_predictions, metrics_report, report_to_dict, write_predictions, write_report
