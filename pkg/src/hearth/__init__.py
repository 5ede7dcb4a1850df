"""hearth: a memory-aware home-automation runtime and simulator.

A small publish-subscribe runtime (entities, states, services, scenes,
automations) built around fixed-budget telemetry stores that realize the
interval-tiered retention strategies, plus a deterministic device
simulator, a scenario harness, and an HTTP/WebSocket gateway.
"""

from .automation import (
    ActivateScene,
    All,
    AnyOf,
    Automation,
    AutomationEngine,
    BinaryState,
    CallService,
    EventTrigger,
    FireOutcome,
    FireStatus,
    Not,
    NumericState,
    Scene,
    SceneTarget,
    StateTrigger,
    TimeTrigger,
    TimeWindow,
    evaluate_condition,
    evaluate_trigger,
)
from .config import (
    ConfigDocument,
    EntityDef,
    StoreDef,
    ValidatedConfig,
    canonical_emit,
    load,
    parse,
    validate,
)
from .core import (
    Binary,
    DeviceKind,
    Entity,
    EntityRegistry,
    Event,
    EventBus,
    Numeric,
    ServiceDescriptor,
    ServiceRegistry,
    ServiceResult,
    StateValue,
    UNAVAILABLE,
    Unavailable,
    validate_entity_id,
)
from .devices import (
    DeviceFleet,
    DeviceSim,
    ScenarioScript,
    ScriptEvent,
    VirtualClock,
    activity_at,
    build_fleet,
    temperature_at,
)
from .harness import (
    ElderlyBundle,
    MetricsReport,
    report_to_json,
    reports_to_csv,
    run_24h_elderly,
    run_matrix,
    run_scenario,
    sample_config,
    sample_config_text,
)
from .home import BoundStore, Home, build_home
from .memstore import (
    DEFAULT_BUDGET_UNITS,
    TIERS,
    LogEntry,
    Sample,
    ScenarioKind,
    Store,
    StrategyKind,
    SummaryRecord,
    TrendSegment,
    fold_window,
    new_store,
    record_cost,
    segment_value,
    select_strategy,
)

__version__ = "0.1.0"
