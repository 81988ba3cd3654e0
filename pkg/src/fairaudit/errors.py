"""Exception types raised across the audit pipeline."""


class FairAuditError(Exception):
    """Base class for every error this package raises deliberately."""


class EmptyDataset(FairAuditError):
    pass


class SingleGroup(FairAuditError):
    def __init__(self, groups=()):
        self.groups = tuple(groups)
        super().__init__(f"at least 2 groups required, got {len(self.groups)}: {list(self.groups)}")


class EmptyGroup(FairAuditError):
    def __init__(self, group):
        self.group = group
        super().__init__(f"group {group!r} has no records")


class MissingPrediction(FairAuditError):
    pass


# individual_metrics speaks of "predictions" in the plural; same condition.
MissingPredictions = MissingPrediction


class MissingScore(FairAuditError):
    pass


class MissingFeatures(FairAuditError):
    pass


class KTooLarge(FairAuditError):
    def __init__(self, k, n):
        self.k, self.n = k, n
        super().__init__(f"k={k} must be smaller than the number of records ({n})")


class UndefinedRate(FairAuditError):
    def __init__(self, group, rate):
        self.group, self.rate = group, rate
        super().__init__(f"{rate} is undefined for group {group!r} (zero denominator)")


class DegenerateGroup(FairAuditError):
    def __init__(self, group, missing_class=None):
        self.group, self.missing_class = group, missing_class
        what = f"no {missing_class}-class records" if missing_class else "needs both outcome classes"
        super().__init__(f"group {group!r}: {what}")


class NoBinsPopulated(FairAuditError):
    def __init__(self, group):
        self.group = group
        super().__init__(f"group {group!r} populates no calibration bin")


class ZeroSelectionEverywhere(FairAuditError):
    pass


class AutoWithoutData(FairAuditError):
    def __init__(self, fields):
        self.fields = tuple(fields)
        super().__init__(f"'auto' answers need a dataset to resolve: {', '.join(self.fields)}")


class ContextError(FairAuditError):
    """Malformed selector context (unknown field, bad enumerant, missing answer)."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# ingestion

class SchemaError(FairAuditError):
    pass


class MissingColumn(FairAuditError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"column {name!r} not found")


class BadLabel(FairAuditError):
    def __init__(self, row, value):
        self.row, self.value = row, value
        super().__init__(f"row {row}: unrecognised label {value!r}")


class BadScore(FairAuditError):
    def __init__(self, row, value):
        self.row, self.value = row, value
        super().__init__(f"row {row}: score {value!r} outside [0, 1]")


class ParseError(FairAuditError):
    def __init__(self, row, detail=""):
        self.row, self.detail = row, detail
        msg = f"row {row}: could not parse" if row is not None else "could not parse input"
        super().__init__(f"{msg}: {detail}" if detail else msg)
