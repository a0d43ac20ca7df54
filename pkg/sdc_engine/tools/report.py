"""
Report builders for the CLI.

Results are turned into status dictionaries ({"status": "success" | "error", ...})
that are either dumped as JSON (--json) or rendered as plain text.
"""
import dataclasses

from sdc_engine.evolution import EvolutionResult
from sdc_engine.sdc import SdcCertificate
from sdc_engine.shared.utils import complex_pair, to_json_primitive, to_json_text
from sdc_engine.synth import SynthInstance


def reason_status(reason) -> dict | None:
    if reason is None:
        return None
    out = {"kind": reason.kind, "message": reason.describe()}
    out.update(dataclasses.asdict(reason))
    return out


def certificate_status(cert: SdcCertificate) -> dict:
    """Stable report schema for a decision (documented in README.md)."""
    return {
        "status": "success",
        "verdict": cert.verdict.value,
        "reason": reason_status(cert.reason),
        "n": cert.n,
        "m": cert.m,
        "r": cert.r,
        "lambda0": [complex_pair(z) for z in cert.witness.lambda0],
        "kernel_dimension": cert.kernel_dimension,
        "residual": cert.residual,
        "marginal": cert.marginal,
        "diagnostics": to_json_primitive(cert.diagnostics),
    }


def evolution_status(result: EvolutionResult) -> dict:
    status = certificate_status(result.certificate)
    status["evolution_algebra"] = result.is_evolution_algebra
    if result.natural_constants is not None:
        status["natural_constants"] = to_json_primitive(result.natural_constants)
    return status


def synth_status(instance: SynthInstance, family_path, truth_path) -> dict:
    return {
        "status": "success",
        "kind": instance.kind,
        "name": instance.name,
        "n": instance.n,
        "m": instance.m,
        "r": instance.r,
        "seed": instance.seed,
        "output": str(family_path),
        "truth": str(truth_path),
    }


def error_status(message: str) -> dict:
    return {"status": "error", "message": message}


def _fmt_complex(pair) -> str:
    re, im = pair
    return f"{re:.6g}{im:+.6g}i"


def render_text(status: dict) -> str:
    """Human-readable rendering of a status dictionary."""
    if status.get("status") == "error":
        return f"error: {status['message']}"
    if "verdict" not in status:
        return "\n".join(f"{key}: {value}" for key, value in status.items() if key != "status")

    lines = [f"verdict: {status['verdict']}"]
    if status["reason"]:
        lines.append(f"reason: {status['reason']['kind']} ({status['reason']['message']})")
    lines.append(f"n={status['n']} m={status['m']} r={status['r']}")
    lines.append("lambda0: (" + ", ".join(_fmt_complex(p) for p in status["lambda0"]) + ")")
    if status["kernel_dimension"] is not None:
        lines.append(f"kernel dimension: {status['kernel_dimension']}")
    if status["residual"] is not None:
        flag = " (marginal)" if status["marginal"] else ""
        lines.append(f"residual: {status['residual']:.3e}{flag}")
    if "evolution_algebra" in status:
        lines.append(f"evolution algebra: {'yes' if status['evolution_algebra'] else 'no'}")
    return "\n".join(lines)


def render(status: dict, as_json: bool) -> str:
    return to_json_text(status) if as_json else render_text(status)
