"""Candidate authoring: turn a free-English requirement into Restricted
English candidates via an LLM provider, with a deterministic offline stub.

Provider output is one candidate per line; lines that fail to parse become
diagnostics, never crashes. Surviving candidates are lowered to LTLf and
deduplicated by language equivalence.
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import re_lang
from .automata import equivalent
from .reqstore import Candidate

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "REACT_LLM_API_KEY"
DEFAULT_TIMEOUT = 30.0


class AuthoringError(Exception):
    pass


class ProviderError(AuthoringError):
    pass


class NoCandidatesError(AuthoringError):
    pass


@dataclass(frozen=True)
class AuthoringRequest:
    source_text: str
    vocabulary: Dict[str, str]  # proposition -> one-line gloss/caption
    max_candidates: int = 5

    def __post_init__(self):
        if self.max_candidates < 1:
            raise AuthoringError("max_candidates must be >= 1")
        if not self.vocabulary:
            raise AuthoringError("vocabulary must be nonempty")


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "stub"  # "stub" | "http"
    endpoint: str = ""
    model: str = ""
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = DEFAULT_TIMEOUT
    retries: int = 2


_RE_GRAMMAR_HELP = """\
Restricted English template (one candidate per line, nothing else):
  <scope>, [when <trigger>,] the <component> shall <timing> satisfy <response>
  scope:  globally | while <bool-expr>
  timing: always | eventually | immediately | within <k> frames | until <bool-expr>
  bool-exprs use only the listed propositions with ~ & | -> and parentheses.
"""


def build_prompt(req: AuthoringRequest) -> str:
    vocab = "\n".join(f"  {name}: {gloss}" for name, gloss in sorted(req.vocabulary.items()))
    return (
        "Translate the requirement below into Restricted English. The English text "
        "may be ambiguous; enumerate every plausible interpretation as a separate "
        f"candidate, at most {req.max_candidates} lines.\n\n"
        f"{_RE_GRAMMAR_HELP}\n"
        f"Propositions:\n{vocab}\n\n"
        f"Requirement:\n{req.source_text}\n"
    )


# ---------------------------------------------------------------------------
# Providers

_STOPWORDS = frozenset(
    "once the a an it its is are was be been being shall should must will would "
    "to of and or that this these those by in on at for with from when while "
    "if then than as not no".split()
)

_WORD = re.compile(r"[a-z][a-z0-9_]*")


class StubProvider:
    """Deterministic offline provider: template rules over the vocabulary.

    Picks the trigger and response propositions by their order of mention in
    the requirement text (vocabulary order as fallback) and emits the two
    canonical readings of a triggered liveness requirement: an eventual
    response and an invariant response.
    """

    def complete(self, prompt: str, req: AuthoringRequest) -> str:
        text = req.source_text.lower()
        mentioned = []
        for name in sorted(req.vocabulary):
            pos = text.find(name)
            if pos < 0:
                # match the name's own words ("cone_encounter" -> "cone"),
                # then fall back to the caption's significant words
                name_words = [w for w in name.split("_") if w not in _STOPWORDS and len(w) > 2]
                caption_words = sorted(
                    set(_WORD.findall(req.vocabulary[name].lower())) - _STOPWORDS
                )
                for words in (name_words, caption_words):
                    positions = [text.find(w) for w in words if text.find(w) >= 0]
                    if positions:
                        pos = min(positions)
                        break
            if pos >= 0:
                mentioned.append((pos, name))
        mentioned.sort()
        ordered = [name for _, name in mentioned] or sorted(req.vocabulary)

        component = "system"
        for word in _WORD.findall(text):
            if word not in _STOPWORDS and word not in req.vocabulary:
                component = word
                break

        if len(ordered) >= 2:
            trigger, response = ordered[0], ordered[-1]
            lines = [
                f"globally, when {trigger}, the {component} shall eventually satisfy {response}",
                f"globally, when {trigger}, the {component} shall always satisfy {response}",
            ]
        else:
            response = ordered[0]
            lines = [
                f"globally, the {component} shall always satisfy {response}",
                f"globally, the {component} shall eventually satisfy {response}",
            ]
        return "\n".join(lines[: req.max_candidates])


class HttpChatCompletionProvider:
    """Minimal chat-completion client; vendor-neutral request/response."""

    def __init__(self, config: ProviderConfig, session=None):
        if not config.endpoint:
            raise AuthoringError("http provider requires an endpoint")
        self.config = config
        if session is None:
            import requests

            session = requests.Session()
        self.session = session

    def complete(self, prompt: str, req: AuthoringRequest) -> str:
        api_key = os.environ.get(self.config.api_key_env, "")
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        log.debug("authoring request to %s: %s", self.config.endpoint,
                  {**body, "messages": "<prompt redacted at info; see debug>"})
        last_error: Optional[Exception] = None
        for attempt in range(self.config.retries + 1):
            try:
                resp = self.session.post(
                    self.config.endpoint, json=body, headers=headers,
                    timeout=self.config.timeout,
                )
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except Exception as exc:  # transport, HTTP, or shape errors
                last_error = exc
                log.debug("authoring attempt %d failed: %s", attempt + 1, exc)
                if attempt < self.config.retries:
                    time.sleep(min(2 ** attempt, 5))
        raise ProviderError(f"provider failed after {self.config.retries + 1} attempts: {last_error}")


def make_provider(config: ProviderConfig):
    if config.kind == "stub":
        return StubProvider()
    if config.kind == "http":
        return HttpChatCompletionProvider(config)
    raise AuthoringError(f"unknown provider kind {config.kind!r}")


# ---------------------------------------------------------------------------
# Authoring pipeline

@dataclass
class AuthoringResult:
    candidates: List[Candidate]
    diagnostics: List[str] = field(default_factory=list)


def author_candidates(req: AuthoringRequest,
                      config: Optional[ProviderConfig] = None,
                      provider=None) -> AuthoringResult:
    """Run the provider and convert its output into validated candidates.

    Parse failures are collected as diagnostics; exact language duplicates
    are collapsed, keeping the first occurrence. Raises NoCandidatesError
    if nothing parseable survives.
    """
    if provider is None:
        provider = make_provider(config or ProviderConfig())
    prompt = build_prompt(req)
    output = provider.complete(prompt, req)

    props = sorted(req.vocabulary)
    parsed: List[Candidate] = []
    diagnostics: List[str] = []
    for lineno, line in enumerate(output.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            parsed.append(Candidate.from_re_text(line, props))
        except Exception as exc:
            diagnostics.append(f"line {lineno}: {exc}")
        if len(parsed) >= req.max_candidates:
            break
    if not parsed:
        raise NoCandidatesError(
            "provider produced no parseable candidates: " + "; ".join(diagnostics)
        )

    kept: List[Candidate] = []
    for cand in parsed:
        dup = any(
            equivalent(cand.dfa(props), existing.dfa(props)) for existing in kept
        )
        if dup:
            diagnostics.append(f"dropped duplicate interpretation: {cand.re_text!r}")
        else:
            kept.append(cand)
    return AuthoringResult(candidates=kept, diagnostics=diagnostics)
