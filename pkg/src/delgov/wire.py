"""Wire codec for protocol messages.

Format rules:

- UTF-8 JSON text. Object keys are emitted in sorted order with compact
  separators, so equal values always encode to identical bytes and byte
  counts are reproducible across runs.
- Absent optional fields are omitted entirely, never emitted as null.
  An empty list is equivalent to an absent one.
- Timestamps are RFC 3339 UTC strings, e.g. ``"2026-03-15T18:00:00Z"``.
- Money is carried as a decimal string so roundtrips are exact on every
  platform; it is parsed to :class:`decimal.Decimal` internally.
- Unknown object keys are ignored on decode (new fields never break old
  readers). Unknown enum values are rejected: trust semantics must never
  be guessed.

Decode failures split into two exceptions, both raised before any message
processing happens:

- :class:`MalformedMessage` for syntactic problems: not JSON, not an
  object, missing required keys, or a key bound to the wrong JSON type.
- :class:`InvariantViolation` for well-shaped input whose values break a
  semantic rule (range, enum membership, cross-field requirements).

A message without any governance fields (contract, claims, provenance)
decodes exactly as the base protocol would read it; the governance keys
simply stay absent.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from typing import Any, Optional, Union

from .errors import default_semantics
from .types import (
    Budget,
    ClaimType,
    DelegationContract,
    DomainType,
    FailurePolicy,
    LdpError,
    Message,
    PolicyEnvelope,
    Provenance,
    QualityClaim,
    TaskResult,
    TaskSubmit,
    VerificationStatus,
)


class DecodeError(ValueError):
    """Base class for wire-level rejections."""


class MalformedMessage(DecodeError):
    """Input is not syntactically valid wire text for any known shape."""


class InvariantViolation(DecodeError):
    """Input parses but violates one or more semantic invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


# ---------------------------------------------------------------------------
# scalar helpers


def format_timestamp(value: datetime) -> str:
    """RFC 3339 UTC text; fractional seconds only when present."""
    value = value.astimezone(timezone.utc)
    text = value.strftime("%Y-%m-%dT%H:%M:%S")
    if value.microsecond:
        text += f".{value.microsecond:06d}"
    return text + "Z"


def parse_timestamp(raw: Any, path: str) -> datetime:
    if not isinstance(raw, str):
        raise MalformedMessage(f"{path}: expected an RFC 3339 string")
    text = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise MalformedMessage(f"{path}: invalid RFC 3339 timestamp {raw!r}") from None
    if parsed.tzinfo is None:
        raise MalformedMessage(f"{path}: timestamp {raw!r} lacks a UTC offset")
    return parsed.astimezone(timezone.utc)


def format_money(value: Decimal) -> str:
    return str(value)


def parse_money(raw: Any, path: str) -> Decimal:
    if isinstance(raw, bool):
        raise MalformedMessage(f"{path}: expected a decimal string or number")
    if isinstance(raw, (str, int)):
        try:
            return Decimal(raw)
        except InvalidOperation:
            raise MalformedMessage(f"{path}: invalid decimal {raw!r}") from None
    if isinstance(raw, float):
        return Decimal(repr(raw))
    raise MalformedMessage(f"{path}: expected a decimal string or number")


def _obj(raw: Any, path: str) -> dict:
    if not isinstance(raw, dict):
        raise MalformedMessage(f"{path}: expected an object")
    return raw


def _str(obj: dict, key: str, path: str) -> str:
    if key not in obj:
        raise MalformedMessage(f"{path}: missing required key {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise MalformedMessage(f"{path}.{key}: expected a string")
    return value


def _opt_str(obj: dict, key: str, path: str) -> Optional[str]:
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise MalformedMessage(f"{path}.{key}: expected a string")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedMessage(f"{path}: expected an integer")
    return value


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedMessage(f"{path}: expected a number")
    return float(value)


def _str_list(obj: dict, key: str, path: str) -> tuple[str, ...]:
    value = obj.get(key)
    if value is None:
        return ()
    if not isinstance(value, list):
        raise MalformedMessage(f"{path}.{key}: expected a list of strings")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, str):
            raise MalformedMessage(f"{path}.{key}[{i}]: expected a string")
        out.append(item)
    return tuple(out)


def _enum(cls: type, raw: Any, path: str) -> Any:
    if not isinstance(raw, str):
        raise MalformedMessage(f"{path}: expected a string")
    try:
        return cls(raw)
    except ValueError:
        raise InvariantViolation(
            [f"{path}: unknown {cls.__name__} value {raw!r}"]
        ) from None


# ---------------------------------------------------------------------------
# to-wire conversion (dict form; absent and empty optionals are dropped)


def budget_to_wire(budget: Budget) -> dict:
    out: dict[str, Any] = {}
    if budget.max_tokens is not None:
        out["max_tokens"] = budget.max_tokens
    if budget.max_cost_usd is not None:
        out["max_cost_usd"] = format_money(budget.max_cost_usd)
    return out


def policy_to_wire(policy: PolicyEnvelope) -> dict:
    out: dict[str, Any] = {"failure_policy": policy.failure_policy.value}
    if policy.budget is not None:
        out["budget"] = budget_to_wire(policy.budget)
    if policy.safety_constraints:
        out["safety_constraints"] = list(policy.safety_constraints)
    if policy.max_delegation_depth is not None:
        out["max_delegation_depth"] = policy.max_delegation_depth
    return out


def contract_to_wire(contract: DelegationContract) -> dict:
    out: dict[str, Any] = {
        "contract_id": contract.contract_id,
        "objective": contract.objective,
        "policy": policy_to_wire(contract.policy),
    }
    if contract.success_criteria:
        out["success_criteria"] = list(contract.success_criteria)
    if contract.deadline is not None:
        out["deadline"] = format_timestamp(contract.deadline)
    return out


def claim_to_wire(claim: QualityClaim) -> dict:
    out: dict[str, Any] = {
        "skill": claim.skill,
        "value": claim.value,
        "claim_type": claim.claim_type.value,
    }
    if claim.issuer is not None:
        out["issuer"] = claim.issuer
    if claim.observed_at is not None:
        out["observed_at"] = format_timestamp(claim.observed_at)
    return out


def provenance_to_wire(provenance: Provenance) -> dict:
    out: dict[str, Any] = {
        "verification_status": provenance.verification_status.value,
    }
    if provenance.evidence_refs:
        out["evidence_refs"] = list(provenance.evidence_refs)
    if provenance.lineage:
        out["lineage"] = list(provenance.lineage)
    return out


def ldp_error_to_wire(error: LdpError) -> dict:
    out: dict[str, Any] = {
        "category": error.category.value,
        "severity": error.severity.value,
        "retryable": error.retryable,
        "code": error.code,
        "message": error.message,
    }
    if error.partial_output is not None:
        out["partial_output"] = error.partial_output
    return out


def message_to_wire(msg: Message) -> dict:
    if isinstance(msg, TaskSubmit):
        out: dict[str, Any] = {"task_id": msg.task_id, "payload": msg.payload}
        if msg.contract is not None:
            out["contract"] = contract_to_wire(msg.contract)
        return out
    if isinstance(msg, TaskResult):
        out = {
            "task_id": msg.task_id,
            "output": msg.output,
            "tokens_used": msg.tokens_used,
            "cost_usd": format_money(msg.cost_usd),
            "completed_at": format_timestamp(msg.completed_at),
        }
        if msg.provenance is not None:
            out["provenance"] = provenance_to_wire(msg.provenance)
        return out
    raise TypeError(f"not a protocol message: {type(msg).__name__}")


def canonical_bytes(obj: Any) -> bytes:
    """Canonical JSON encoding: sorted keys, compact separators, UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def encode_message(msg: Message) -> bytes:
    """Encode a message to canonical wire bytes.

    Valid in-memory values always encode; callers own the precondition
    that ``msg`` satisfies its invariants (see ``validate_invariants``).
    """
    return canonical_bytes(message_to_wire(msg))


# ---------------------------------------------------------------------------
# from-wire conversion


def budget_from_wire(raw: Any, path: str = "budget") -> Budget:
    obj = _obj(raw, path)
    max_tokens = obj.get("max_tokens")
    if max_tokens is not None:
        max_tokens = _int(max_tokens, f"{path}.max_tokens")
    max_cost = obj.get("max_cost_usd")
    if max_cost is not None:
        max_cost = parse_money(max_cost, f"{path}.max_cost_usd")
    return Budget(max_tokens=max_tokens, max_cost_usd=max_cost)


def policy_from_wire(raw: Any, path: str = "policy") -> PolicyEnvelope:
    obj = _obj(raw, path)
    if "failure_policy" not in obj:
        raise MalformedMessage(f"{path}: missing required key 'failure_policy'")
    failure_policy = _enum(FailurePolicy, obj["failure_policy"], f"{path}.failure_policy")
    budget = obj.get("budget")
    if budget is not None:
        budget = budget_from_wire(budget, f"{path}.budget")
    depth = obj.get("max_delegation_depth")
    if depth is not None:
        depth = _int(depth, f"{path}.max_delegation_depth")
    return PolicyEnvelope(
        failure_policy=failure_policy,
        budget=budget,
        safety_constraints=_str_list(obj, "safety_constraints", path),
        max_delegation_depth=depth,
    )


def contract_from_wire(raw: Any, path: str = "contract") -> DelegationContract:
    obj = _obj(raw, path)
    contract_id = _str(obj, "contract_id", path)
    objective = _str(obj, "objective", path)
    if "policy" not in obj:
        raise MalformedMessage(f"{path}: missing required key 'policy'")
    deadline = obj.get("deadline")
    if deadline is not None:
        deadline = parse_timestamp(deadline, f"{path}.deadline")
    return DelegationContract(
        contract_id=contract_id,
        objective=objective,
        policy=policy_from_wire(obj["policy"], f"{path}.policy"),
        success_criteria=_str_list(obj, "success_criteria", path),
        deadline=deadline,
    )


def claim_from_wire(raw: Any, path: str = "claim") -> QualityClaim:
    obj = _obj(raw, path)
    skill = _str(obj, "skill", path)
    if "value" not in obj:
        raise MalformedMessage(f"{path}: missing required key 'value'")
    value = _number(obj["value"], f"{path}.value")
    if "claim_type" not in obj:
        raise MalformedMessage(f"{path}: missing required key 'claim_type'")
    claim_type = _enum(ClaimType, obj["claim_type"], f"{path}.claim_type")
    observed_at = obj.get("observed_at")
    if observed_at is not None:
        observed_at = parse_timestamp(observed_at, f"{path}.observed_at")
    claim = QualityClaim(
        skill=skill,
        value=value,
        claim_type=claim_type,
        issuer=_opt_str(obj, "issuer", path),
        observed_at=observed_at,
    )
    violations = validate_invariants(claim)
    if violations:
        raise InvariantViolation(violations)
    return claim


def provenance_from_wire(raw: Any, path: str = "provenance") -> Provenance:
    obj = _obj(raw, path)
    if "verification_status" not in obj:
        raise MalformedMessage(f"{path}: missing required key 'verification_status'")
    status = _enum(VerificationStatus, obj["verification_status"], f"{path}.verification_status")
    return Provenance(
        verification_status=status,
        evidence_refs=_str_list(obj, "evidence_refs", path),
        lineage=_str_list(obj, "lineage", path),
    )


def _submit_from_wire(obj: dict) -> TaskSubmit:
    contract = obj.get("contract")
    if contract is not None:
        contract = contract_from_wire(contract, "contract")
    return TaskSubmit(
        task_id=_str(obj, "task_id", "message"),
        payload=_str(obj, "payload", "message"),
        contract=contract,
    )


def _result_from_wire(obj: dict) -> TaskResult:
    if "tokens_used" not in obj:
        raise MalformedMessage("message: missing required key 'tokens_used'")
    if "cost_usd" not in obj:
        raise MalformedMessage("message: missing required key 'cost_usd'")
    if "completed_at" not in obj:
        raise MalformedMessage("message: missing required key 'completed_at'")
    provenance = obj.get("provenance")
    if provenance is not None:
        provenance = provenance_from_wire(provenance, "provenance")
    return TaskResult(
        task_id=_str(obj, "task_id", "message"),
        output=_str(obj, "output", "message"),
        tokens_used=_int(obj["tokens_used"], "message.tokens_used"),
        cost_usd=parse_money(obj["cost_usd"], "message.cost_usd"),
        completed_at=parse_timestamp(obj["completed_at"], "message.completed_at"),
        provenance=provenance,
    )


def _load_object(data: Union[bytes, str]) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedMessage("message: input is not valid UTF-8") from None
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedMessage(f"message: invalid JSON ({exc.msg})") from None
    if not isinstance(parsed, dict):
        raise MalformedMessage("message: top-level value must be an object")
    return parsed


def decode_message(data: Union[bytes, str]) -> Message:
    """Decode wire bytes into a TaskSubmit or TaskResult.

    The two message shapes are told apart by their distinguishing keys:
    ``payload`` marks a submission, ``output`` a result. Unknown keys are
    discarded; all invariants are checked before the value is returned.
    """
    obj = _load_object(data)
    has_payload = obj.get("payload") is not None
    has_output = obj.get("output") is not None
    if has_payload and has_output:
        raise MalformedMessage("message: both 'payload' and 'output' present; shape is ambiguous")
    if has_payload:
        msg: Message = _submit_from_wire(obj)
    elif has_output:
        msg = _result_from_wire(obj)
    else:
        raise MalformedMessage("message: neither 'payload' nor 'output' present")
    violations = validate_invariants(msg)
    if violations:
        raise InvariantViolation(violations)
    return msg


def decode_contract(data: Union[bytes, str]) -> DelegationContract:
    """Decode a standalone contract document and check its invariants."""
    contract = contract_from_wire(_load_object(data), "contract")
    violations = validate_invariants(contract)
    if violations:
        raise InvariantViolation(violations)
    return contract


def decode_any(data: Union[bytes, str]) -> DomainType:
    """Decode any known wire object (message, contract, or quality claim).

    Used by file-level validation, where the caller does not know in
    advance which protocol object a document holds.
    """
    obj = _load_object(data)
    if obj.get("payload") is not None or obj.get("output") is not None:
        return decode_message(data)
    if "contract_id" in obj:
        return decode_contract(data)
    if "claim_type" in obj and "skill" in obj:
        return claim_from_wire(obj, "claim")
    raise MalformedMessage("document: does not match any known wire object")


# ---------------------------------------------------------------------------
# invariant validation


def validate_invariants(msg: DomainType) -> list[str]:
    """List every broken invariant of a domain value (empty means valid).

    Each entry names the offending type and field plus the rule that was
    broken, so callers can log or aggregate them directly.
    """
    out: list[str] = []
    _validate(msg, out)
    return out


def _validate(value: DomainType, out: list[str]) -> None:
    if isinstance(value, Budget):
        if value.max_tokens is None and value.max_cost_usd is None:
            out.append("Budget: at least one of max_tokens or max_cost_usd must be present")
        if value.max_tokens is not None and value.max_tokens <= 0:
            out.append(f"Budget.max_tokens: must be strictly positive (got {value.max_tokens})")
        if value.max_cost_usd is not None and value.max_cost_usd <= 0:
            out.append(f"Budget.max_cost_usd: must be strictly positive (got {value.max_cost_usd})")
    elif isinstance(value, PolicyEnvelope):
        if value.max_delegation_depth is not None and value.max_delegation_depth < 0:
            out.append(
                "PolicyEnvelope.max_delegation_depth: must be >= 0 "
                f"(got {value.max_delegation_depth})"
            )
        if value.budget is not None:
            _validate(value.budget, out)
    elif isinstance(value, DelegationContract):
        if not value.contract_id:
            out.append("DelegationContract.contract_id: must be non-empty")
        _validate(value.policy, out)
    elif isinstance(value, QualityClaim):
        if not 0.0 <= value.value <= 1.0:
            out.append(f"QualityClaim.value: must be within [0, 1] (got {value.value})")
        if value.claim_type is ClaimType.ISSUER_ATTESTED and not value.issuer:
            out.append("QualityClaim.issuer: required when claim_type is issuer_attested")
    elif isinstance(value, LdpError):
        expected = default_semantics(value.category)
        if value.retryable != expected.retryable:
            out.append(
                f"LdpError.retryable: category {value.category.value!r} requires "
                f"retryable={expected.retryable}"
            )
        if value.severity is not expected.severity:
            out.append(
                f"LdpError.severity: category {value.category.value!r} requires "
                f"severity={expected.severity.value!r}"
            )
    elif isinstance(value, Provenance):
        pass  # standalone provenance has no range rules; see TaskResult
    elif isinstance(value, TaskSubmit):
        if not value.task_id:
            out.append("TaskSubmit.task_id: must be non-empty")
        if value.contract is not None:
            _validate(value.contract, out)
    elif isinstance(value, TaskResult):
        if value.tokens_used < 0:
            out.append(f"TaskResult.tokens_used: must be >= 0 (got {value.tokens_used})")
        if value.cost_usd < 0:
            out.append(f"TaskResult.cost_usd: must be >= 0 (got {value.cost_usd})")
        if value.provenance is not None:
            if not value.provenance.lineage:
                out.append("Provenance.lineage: must have at least one entry when attached to a result")
            _validate(value.provenance, out)
    else:
        raise TypeError(f"not a protocol domain type: {type(value).__name__}")
