"""Exception types raised by the engine.

Every error the HTTP layer maps to a status code lives here, so the
mapping table in ``service`` stays total.
"""


class SoundsceneError(Exception):
    """Base class for all engine errors."""


# --- scene / image ---

class UnsupportedFormat(SoundsceneError):
    """Image bytes are a recognized format other than PNG or JPEG."""


class CorruptImage(SoundsceneError):
    """Image header could not be parsed."""


class OutOfBounds(SoundsceneError):
    """Bounding box does not fit inside the image."""


class DetectorUnavailable(SoundsceneError):
    """Object detector failed or produced invalid output."""


# --- audio / WAV ---

class InvalidWav(SoundsceneError):
    """Bytes are not a parseable RIFF/WAV file."""


class UnsupportedEncoding(SoundsceneError):
    """WAV file uses a codec or layout we do not decode (e.g. ADPCM)."""


class EmptySource(SoundsceneError):
    """Loop source has no samples but a non-zero target length."""


# --- catalog / bindings ---

class UnknownObject(SoundsceneError):
    pass


class UnknownAsset(SoundsceneError):
    pass


class RoleMismatch(SoundsceneError):
    """Asset role is not valid for the requested use (e.g. music bound to an object)."""


class GainOutOfRange(SoundsceneError, ValueError):
    """Gain outside the allowed [0, 4] linear range."""


# --- transport / timeline ---

class NoMusicSelected(SoundsceneError):
    pass


class AlreadyRecording(SoundsceneError):
    pass


class NotRecording(SoundsceneError):
    pass


class NotStopped(SoundsceneError):
    pass


class UnboundObject(SoundsceneError):
    """Trigger for an object with no sound binding."""


class ClockBeforeStart(SoundsceneError):
    pass


class PastCap(SoundsceneError):
    """Trigger offset beyond the 600 s session cap."""


class IndexOutOfRange(SoundsceneError, IndexError):
    pass


class ReRecordRequiresConfirm(SoundsceneError):
    """Starting over would discard recorded events; caller must confirm."""


# --- dialogue / generation ---

class EmptyBrief(SoundsceneError):
    pass


class BackendFailure(SoundsceneError):
    """Describe/generate backend failed; the dialogue state is unchanged."""


class UnknownOption(SoundsceneError):
    pass


class StateViolation(SoundsceneError):
    """Operation not legal in the current dialogue/transport state."""


class Busy(SoundsceneError):
    """A generation is already in flight for this project."""


# --- render ---

class MissingAsset(SoundsceneError):
    """Timeline references an asset the resolver cannot supply."""


class EmptyTimeline(SoundsceneError):
    """Render requested for a timeline with zero duration."""


# --- persistence / service ---

class UnknownProject(SoundsceneError):
    pass


class UnknownRender(SoundsceneError):
    pass


class StorageFailure(SoundsceneError):
    """Filesystem write failed underneath the project store."""


# --- statistics ---

class RangeViolation(SoundsceneError, ValueError):
    """Questionnaire value outside the -3..3 scale."""


class LengthMismatch(SoundsceneError, ValueError):
    pass


class TooFewPairs(SoundsceneError, ValueError):
    pass


class ZeroVariance(SoundsceneError):
    """All paired differences are equal; the t statistic is undefined."""


class TooFewItems(SoundsceneError, ValueError):
    pass


class ZeroTotalVariance(SoundsceneError):
    pass


class DivisionByZero(SoundsceneError, ZeroDivisionError):
    pass
