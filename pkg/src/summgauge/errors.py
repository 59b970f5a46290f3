"""Exception types shared across the toolkit.

Every classified failure maps to one subclass of :class:`SummGaugeError`,
so callers (and the CLI) can distinguish bad input (exit code 2) from bugs.
"""


class SummGaugeError(Exception):
    """Base class for all toolkit errors."""


# --- ingest ---------------------------------------------------------------

class MalformedLine(SummGaugeError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: not valid JSON{': ' + detail if detail else ''}")


class SchemaViolation(SummGaugeError):
    def __init__(self, line_no: int, field: str, detail: str = ""):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}: field '{field}' {detail or 'missing or empty'}")


class DuplicateTopic(SummGaugeError):
    def __init__(self, topic_id: str):
        self.topic_id = topic_id
        super().__init__(f"duplicate topic_id '{topic_id}'")


# --- text processing ------------------------------------------------------

class EmptyAfterFiltering(SummGaugeError):
    """All tokens were stopwords or the text had no tokens at all."""


class NoSCUs(SummGaugeError):
    """No clause survives the minimum content-word filter."""


# --- oracle ---------------------------------------------------------------

class NoSentences(SummGaugeError):
    """Topic documents segment to zero sentences."""


class TooLarge(SummGaugeError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"instance has {count} sentences, exact solver limit is {limit}")


# --- corpus metrics -------------------------------------------------------

class DegenerateReference(SummGaugeError):
    """Reference tokenizes to fewer than n tokens."""


class SingleDocument(SummGaugeError):
    """Metric undefined for topics with a single candidate document."""


class VocabularyMismatch(SummGaugeError):
    """Distributions are not defined over the same vocabulary."""


# --- system metrics -------------------------------------------------------

class EmptyOracle(SummGaugeError):
    """Oracle selection is empty; dependent metrics are undefined."""


class DegenerateSummary(SummGaugeError):
    """Summary tokenizes to fewer than n tokens."""


# --- baselines ------------------------------------------------------------

class NoConcepts(SummGaugeError):
    """No weighted concept could be extracted from the documents."""


class UnknownAlgorithm(SummGaugeError):
    def __init__(self, name: str, known: tuple[str, ...]):
        self.name = name
        super().__init__(f"unknown algorithm '{name}' (choose from: {', '.join(known)})")


# --- analysis -------------------------------------------------------------

class LengthMismatch(SummGaugeError):
    """Paired series have different lengths."""


class TooFewSamples(SummGaugeError):
    """Correlation requires at least 3 paired samples."""


class ZeroVariance(SummGaugeError):
    """A series is constant; correlation is undefined."""


class NoOverlap(SummGaugeError):
    """No corpus is shared by the systems under comparison."""


class MissingOracle(SummGaugeError):
    """Report lacks an oracle section."""
