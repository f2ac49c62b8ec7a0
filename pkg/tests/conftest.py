import pytest

from eventflow import DAY, PrepConfig, SynthSpec, build_dataset, generate_synthetic

SPAN_START = 1262304000  # 2010-01-01
SPAN_END = 1293840000  # 2011-01-01


@pytest.fixture
def synth_dataset():
    """Factory for small prepared datasets with a planted pattern."""

    def make(
        seed=0,
        n_sequences=40,
        n_event_types=8,
        pattern=("et00", "et01", "et02"),
        planted_fraction=0.5,
        p_pos=1.0,
        noise_rate=2.0,
        cutoff=None,
        eval_end=None,
    ):
        spec = SynthSpec(
            n_sequences=n_sequences,
            n_event_types=n_event_types,
            planted_pattern=pattern,
            planted_fraction=planted_fraction,
            p_pos=p_pos,
            noise_rate=noise_rate,
            time_span=(SPAN_START, SPAN_END),
            seed=seed,
        )
        events, outcomes = generate_synthetic(spec)
        prep = PrepConfig(
            outcome_type="outcome",
            cutoff=SPAN_END + 40 * DAY if cutoff is None else cutoff,
            eval_end=SPAN_END + 400 * DAY if eval_end is None else eval_end,
        )
        return build_dataset(events, outcomes, prep)

    return make
