"""Workflow engine for running structured prompt scripts against a
conversational-AI backend to co-create agent-based social simulation
models, with human steering, diagram repair and report assembly."""

__version__ = "0.1.0"

from .script import (  # noqa: F401
    CaseBinding,
    KeyRef,
    PromptChain,
    ScriptDocument,
    bind_case,
    parse_chain,
    parse_script,
    render_chain,
    static_check,
)
from .gateway import (  # noqa: F401
    GenerationParams,
    LiveBackend,
    RecordingBackend,
    ReplayBackend,
    ScriptedBackend,
)
from .engine import Session, SessionOptions, start_session  # noqa: F401
from .report import ReportDocument, assemble_report, export  # noqa: F401
