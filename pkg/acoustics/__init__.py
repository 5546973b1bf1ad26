"""Room acoustics: image-method RIRs and the primary/secondary path pair."""

from acoustics.room import PathPair, beta_from_t60, generate_rir, simulate_paths

__all__ = ["PathPair", "beta_from_t60", "generate_rir", "simulate_paths"]
