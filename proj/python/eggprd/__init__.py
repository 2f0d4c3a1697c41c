"""Wavelet compression PRD for multichannel gastric recordings."""

from ._core import (
    DataError,
    center_frequency,
    compare_paired,
    compress,
    dwt,
    idwt,
    lilliefors,
    lowpass,
    paired_t,
    pollen_lowpass,
    prd,
    prd_surface,
    read_recording,
    select_scales,
    simulate,
    square_wave,
    wilcoxon,
)

__all__ = [
    "DataError",
    "center_frequency",
    "compare_paired",
    "compress",
    "dwt",
    "idwt",
    "lilliefors",
    "lowpass",
    "paired_t",
    "pollen_lowpass",
    "prd",
    "prd_surface",
    "read_recording",
    "select_scales",
    "simulate",
    "square_wave",
    "wilcoxon",
]
