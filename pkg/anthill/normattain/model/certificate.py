
# strict inequalities must clear this margin, non-strict ones may miss by at most it
SLACK_FLOOR = 1e-12

# relative tolerance of equality assertions
IDENTITY_TOLERANCE = 1e-9


class CertificateError(Exception):
    def __init__(self, message, inequality=None, step=None):
        self.message = message
        self.inequality = inequality
        self.step = step

    def __str__(self):
        if self.step is None:
            return self.message
        return "step {0}: {1}".format(self.step, self.message)


class Inequality(object):
    """
    One certified comparison ``lesser < greater`` (or ``<=`` when not strict).
    """

    def __init__(self, name, lesser, greater, strict=True, note=None):
        self.name = name
        self.lesser = float(lesser)
        self.greater = float(greater)
        self.strict = strict
        self.note = note

    @property
    def slack(self):
        return self.greater - self.lesser

    @property
    def holds(self):
        if self.strict:
            return self.slack > SLACK_FLOOR
        return self.slack >= -SLACK_FLOOR

    def describe(self):
        return "{0}: {1!r} {2} {3!r} (slack {4!r})".format(
            self.name, self.lesser, "<" if self.strict else "<=", self.greater, self.slack)

    def dump(self):
        result = {
            "name": self.name,
            "lesser": self.lesser,
            "greater": self.greater,
            "strict": self.strict,
            "slack": self.slack,
            "holds": self.holds
        }
        if self.note:
            result["note"] = self.note
        return result


class CertificateSheet(object):
    def __init__(self, title=""):
        self.title = title
        self.inequalities = []

    def record(self, name, lesser, greater, strict=True, note=None):
        inequality = Inequality(name, lesser, greater, strict=strict, note=note)
        self.inequalities.append(inequality)
        return inequality

    def require(self, name, lesser, greater, strict=True, note=None):
        inequality = self.record(name, lesser, greater, strict=strict, note=note)
        if not inequality.holds:
            raise CertificateError("Certificate failed: " + inequality.describe(), inequality)
        return inequality

    @property
    def passed(self):
        return all(inequality.holds for inequality in self.inequalities)

    @property
    def failures(self):
        return [inequality for inequality in self.inequalities if not inequality.holds]

    @property
    def min_slack(self):
        if not self.inequalities:
            return float("inf")
        return min(inequality.slack for inequality in self.inequalities)

    @property
    def strict_min_slack(self):
        """Smallest slack among strict inequalities; non-strict ones may hold at zero slack."""
        slacks = [inequality.slack for inequality in self.inequalities if inequality.strict]
        return min(slacks) if slacks else float("inf")

    def find(self, name):
        for inequality in self.inequalities:
            if inequality.name == name:
                return inequality
        return None

    def lines(self):
        return [inequality.describe() for inequality in self.inequalities]

    def dump(self):
        return {
            "title": self.title,
            "passed": self.passed,
            "inequalities": [inequality.dump() for inequality in self.inequalities]
        }
