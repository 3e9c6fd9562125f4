"""Syndrome fuzzy hashing with LDPC codes."""

__version__ = "0.1.0"

from .bits import BitVector, digest, hamming_distance
from .matrix import LdpcCode, SparseParityCheck, encode_systematic, syndrome
from .alist import alist_read, alist_write, code_id
from .ensemble import EnsembleSpec, InfeasibleEnsemble, edge_distributions, feasibility, row_weight_profile
from .density import DeConfig, evolve, threshold
from .peg import PegConfig, girth_histogram, peg_construct
from .decoders import DecoderConfig, DecodeResult, Decoder, Variant
from .schemes import EnrollmentRecord, VerifyOutcome, fc_enroll, fc_verify, fh_enroll, fh_verify
from .channel import BscChannel, SimulationReport, bsc_apply, run_montecarlo
from .entropy import TemplateSet, dof, pairwise_distances, pseudomask_from_masks, synth_generate

__all__ = [
    "BitVector", "digest", "hamming_distance",
    "LdpcCode", "SparseParityCheck", "encode_systematic", "syndrome",
    "alist_read", "alist_write", "code_id",
    "EnsembleSpec", "InfeasibleEnsemble", "edge_distributions", "feasibility", "row_weight_profile",
    "DeConfig", "evolve", "threshold",
    "PegConfig", "girth_histogram", "peg_construct",
    "DecoderConfig", "DecodeResult", "Decoder", "Variant",
    "EnrollmentRecord", "VerifyOutcome", "fc_enroll", "fc_verify", "fh_enroll", "fh_verify",
    "BscChannel", "SimulationReport", "bsc_apply", "run_montecarlo",
    "TemplateSet", "dof", "pairwise_distances", "pseudomask_from_masks", "synth_generate",
]
