"""Session engine: per-session pipelines, event sourcing, live fan-out.

Each session owns a worker thread that serializes its pipeline jobs
(submissions queue FIFO); sessions run in parallel, with a global semaphore
bounding concurrent backend calls. Every state change is an appended
SessionEvent, persisted as one JSON line, so a restart rebuilds sessions by
replaying logs against the panel files on disk.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .config import EngineConfig
from .errors import (
    EmptyInput,
    EquivalenceError,
    TextTooLong,
    UnknownPanel,
    UnknownSession,
)
from .hashing import fnv1a_32, splitmix64
from .language import LanguageAnalyzer, Lexicons
from .prompts import PromptSpec, build_prompt
from .raster import BaseImage, placeholder_gradient, rasterize
from .scroll import (
    Panel,
    Scroll,
    append_panel,
    get_panel,
    render_viewport,
    replace_result,
    set_curated,
)
from .structure import map_structure_or_fallback
from .synthesis import SynthesisRequest, make_backend, synthesize

MAX_UTTERANCE_CHARS = 2000
SUBSCRIBER_BUFFER = 256

EVENT_KINDS = (
    "utterance_received",
    "features_ready",
    "panel_ready",
    "panel_failed",
    "config_changed",
)


def now_ms() -> int:
    return int(time.time() * 1000)


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: str
    payload: dict
    at: int  # ms epoch

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload, "at": self.at}

    @classmethod
    def from_json(cls, d: dict) -> "SessionEvent":
        return cls(seq=d["seq"], kind=d["kind"], payload=d["payload"], at=d["at"])


class Subscription:
    """Bounded per-connection event queue; overflow disconnects the consumer."""

    CLOSE = object()  # sentinel pushed when the subscription is dropped

    def __init__(self):
        self.queue: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_BUFFER)
        self.dropped = False


@dataclass
class _Job:
    kind: str  # "utterance" | "regenerate" | "stop"
    utterance_id: str = ""
    text: str = ""
    panel_index: int = -1
    seed: int | None = None


@dataclass
class Session:
    session_id: str
    root: Path  # data_dir/sessions/{id}
    scroll: Scroll
    events: list[SessionEvent] = field(default_factory=list)
    subscribers: list[Subscription] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)
    jobs: queue.Queue = field(default_factory=queue.Queue)
    next_panel_index: int = 0
    utterance_count: int = 0
    worker: threading.Thread | None = None

    @property
    def events_path(self) -> Path:
        return self.root / "events.jsonl"

    @property
    def panels_dir(self) -> Path:
        return self.root / "panels"

    @property
    def curation_path(self) -> Path:
        return self.root / "curation.json"


class Engine:
    """Owns all sessions and the shared backend/config state."""

    def __init__(self, config: EngineConfig, data_dir: str | Path | None = None):
        self._config = config
        self._config_lock = threading.Lock()
        self.data_dir = Path(data_dir if data_dir is not None else config.service.data_dir)
        self.analyzer = LanguageAnalyzer(Lexicons.load(config.lexicons or None))
        self._backend = make_backend(
            config.backend.kind, config.backend.base_url, config.backend.timeout_ms
        )
        self._inflight = threading.BoundedSemaphore(config.backend.max_in_flight)
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()
        self._closed = False

    # -- configuration ----------------------------------------------------

    @property
    def config(self) -> EngineConfig:
        with self._config_lock:
            return self._config

    def apply_config(self, new_config: EngineConfig) -> str:
        """Swap the engine config (validated by the caller); future jobs only.

        Emits config_changed to every session. Backend handle is rebuilt so
        new jobs talk to the newly configured backend; jobs already running
        finish under the config they captured. The in-flight semaphore keeps
        its startup size.
        """
        new_config.validate()
        with self._config_lock:
            self._config = new_config
            self._backend = make_backend(
                new_config.backend.kind,
                new_config.backend.base_url,
                new_config.backend.timeout_ms,
            )
        digest = new_config.config_hash()
        for session in self._all_sessions():
            self._emit(session, "config_changed", {"config_hash": digest})
        return digest

    def _capture(self):
        with self._config_lock:
            return self._config, self._backend

    # -- session lifecycle -------------------------------------------------

    def create_session(self) -> str:
        session_id = uuid.uuid4().hex[:12]
        scroll = self._new_scroll()
        root = self.data_dir / "sessions" / session_id
        root.mkdir(parents=True, exist_ok=True)
        (root / "panels").mkdir(exist_ok=True)
        session = Session(session_id=session_id, root=root, scroll=scroll)
        self._start_worker(session)
        with self._sessions_lock:
            self._sessions[session_id] = session
        return session_id

    def _new_scroll(self) -> Scroll:
        config = self.config
        return Scroll(
            panel_width=config.mapping.panel_width_px,
            panel_height=config.mapping.panel_height_px,
            overlap_px=config.scroll.overlap_px,
            max_panels=config.scroll.max_panels,
        )

    def _start_worker(self, session: Session) -> None:
        worker = threading.Thread(
            target=self._worker_loop,
            args=(session,),
            name=f"session-{session.session_id}",
            daemon=True,
        )
        session.worker = worker
        worker.start()

    def get_session(self, session_id: str) -> Session:
        with self._sessions_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSession(f"no session {session_id}") from None

    def _all_sessions(self) -> list[Session]:
        with self._sessions_lock:
            return list(self._sessions.values())

    def session_ids(self) -> list[str]:
        with self._sessions_lock:
            return list(self._sessions)

    # -- public operations ---------------------------------------------------

    def submit_utterance(self, session_id: str, text: str) -> str:
        session = self.get_session(session_id)
        if not text.strip():
            raise EmptyInput("utterance text is empty after trimming")
        if len(text) > MAX_UTTERANCE_CHARS:
            raise TextTooLong(
                f"utterance is {len(text)} chars; limit {MAX_UTTERANCE_CHARS}"
            )
        with session.lock:
            session.utterance_count += 1
            utterance_id = f"u-{session.utterance_count:06d}"
        session.jobs.put(_Job(kind="utterance", utterance_id=utterance_id, text=text))
        return utterance_id

    def regenerate_panel(
        self, session_id: str, panel_index: int, new_seed: int | None = None
    ) -> int:
        """Queue a regeneration; returns the seed that will be used."""
        session = self.get_session(session_id)
        with session.lock:
            panel = get_panel(session.scroll, panel_index)  # raises UnknownPanel
        seed = new_seed if new_seed is not None else splitmix64(
            panel.prompt.seed ^ time.time_ns() & 0xFFFFFFFFFFFFFFFF
        )
        session.jobs.put(_Job(kind="regenerate", panel_index=panel_index, seed=seed))
        return seed

    def set_panel_curated(self, session_id: str, panel_index: int, curated: bool) -> int:
        session = self.get_session(session_id)
        with session.lock:
            session.scroll = set_curated(session.scroll, panel_index, curated)
            self._save_curation(session)
            return session.scroll.total_width

    def get_viewport(self, session_id: str, offset_px: int, width_px: int) -> BaseImage:
        session = self.get_session(session_id)
        with session.lock:
            scroll = session.scroll  # immutable snapshot
        return render_viewport(scroll, offset_px, width_px)

    def scroll_state(self, session_id: str) -> Scroll:
        session = self.get_session(session_id)
        with session.lock:
            return session.scroll

    def subscribe(
        self, session_id: str, from_seq: int
    ) -> tuple[list[SessionEvent], Subscription]:
        session = self.get_session(session_id)
        sub = Subscription()
        with session.lock:
            backlog = [e for e in session.events if e.seq >= from_seq]
            session.subscribers.append(sub)
        return backlog, sub

    def unsubscribe(self, session_id: str, sub: Subscription) -> None:
        try:
            session = self.get_session(session_id)
        except UnknownSession:
            return
        with session.lock:
            if sub in session.subscribers:
                session.subscribers.remove(sub)

    def events_since(self, session_id: str, from_seq: int) -> list[SessionEvent]:
        session = self.get_session(session_id)
        with session.lock:
            return [e for e in session.events if e.seq >= from_seq]

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        for session in self._all_sessions():
            session.jobs.put(_Job(kind="stop"))
        for session in self._all_sessions():
            if session.worker is not None:
                session.worker.join(timeout=10)
        closer = getattr(self._backend, "close", None)
        if closer:
            closer()

    # -- event plumbing ------------------------------------------------------

    def _emit(self, session: Session, kind: str, payload: dict) -> SessionEvent:
        assert kind in EVENT_KINDS, kind
        with session.lock:
            event = SessionEvent(
                seq=len(session.events), kind=kind, payload=payload, at=now_ms()
            )
            session.events.append(event)
            with session.events_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_json(), ensure_ascii=False) + "\n")
            stale = []
            for sub in session.subscribers:
                try:
                    sub.queue.put_nowait(event)
                except queue.Full:
                    sub.dropped = True
                    stale.append(sub)
            for sub in stale:
                session.subscribers.remove(sub)
                try:
                    sub.queue.get_nowait()  # make room for the close sentinel
                except queue.Empty:
                    pass
                try:
                    sub.queue.put_nowait(Subscription.CLOSE)
                except queue.Full:
                    pass  # another producer refilled it; `dropped` still set
        return event

    def _save_curation(self, session: Session) -> None:
        state = {str(p.index): p.curated for p in session.scroll.panels}
        tmp = session.curation_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(state, indent=0), encoding="utf-8")
        tmp.replace(session.curation_path)

    # -- pipeline ------------------------------------------------------------

    def _worker_loop(self, session: Session) -> None:
        while True:
            job = session.jobs.get()
            if job.kind == "stop":
                return
            try:
                if job.kind == "utterance":
                    self._run_utterance(session, job)
                elif job.kind == "regenerate":
                    self._run_regenerate(session, job)
            except Exception as exc:  # never kill the worker
                self._emit(
                    session,
                    "panel_failed",
                    {
                        "utterance_id": job.utterance_id,
                        "error": type(exc).__name__,
                        "message": str(exc),
                    },
                )

    def _utterance_seed(self, session: Session, utterance_id: str) -> int:
        return splitmix64(fnv1a_32(f"{session.session_id}:{utterance_id}"))

    def _run_utterance(self, session: Session, job: _Job) -> None:
        config, backend = self._capture()
        self._emit(
            session,
            "utterance_received",
            {"utterance_id": job.utterance_id, "text": job.text},
        )
        try:
            tokens, _, features = self.analyzer.analyze(job.text)
            self._emit(
                session,
                "features_ready",
                {"utterance_id": job.utterance_id, "features": features.to_payload()},
            )
            seed = self._utterance_seed(session, job.utterance_id)
            structure = map_structure_or_fallback(features, tokens, config.mapping, seed)
            base = rasterize(structure, config.mapping)
            prompt = build_prompt(tokens, features, config.mapping, config.prompt, seed)
            request = SynthesisRequest(
                base_image=base.to_png(),
                prompt=prompt.positive,
                negative_prompt=prompt.negative,
                strength=prompt.strength,
                steps=prompt.steps,
                seed=seed,
                width=config.mapping.panel_width_px,
                height=config.mapping.panel_height_px,
            )
            with self._inflight:
                result = synthesize(request, backend)

            with session.lock:
                index = session.next_panel_index
                session.next_panel_index += 1
            base_path = session.panels_dir / f"{index}.base.png"
            result_path = session.panels_dir / f"{index}.png"
            base_path.write_bytes(request.base_image)
            result_path.write_bytes(result.image)

            panel = Panel(
                index=index,
                utterance_id=job.utterance_id,
                base=request.base_image,
                prompt=prompt,
                result=result.image,
                created_at=now_ms(),
            )
            with session.lock:
                session.scroll = append_panel(session.scroll, panel)
                self._save_curation(session)
                total_width = session.scroll.total_width
            self._emit(
                session,
                "panel_ready",
                {
                    "utterance_id": job.utterance_id,
                    "panel_index": index,
                    "result_path": f"panels/{index}.png",
                    "base_path": f"panels/{index}.base.png",
                    "prompt": prompt.to_payload(),
                    "seed_used": result.seed_used,
                    "backend_id": result.backend_id,
                    "duration_ms": result.duration_ms,
                    "total_width": total_width,
                    "regenerated": False,
                },
            )
        except EquivalenceError as exc:
            self._emit(
                session,
                "panel_failed",
                {
                    "utterance_id": job.utterance_id,
                    "error": type(exc).__name__,
                    "message": str(exc),
                },
            )

    def _run_regenerate(self, session: Session, job: _Job) -> None:
        config, backend = self._capture()
        with session.lock:
            panel = get_panel(session.scroll, job.panel_index)
        prompt = PromptSpec(
            positive=panel.prompt.positive,
            negative=panel.prompt.negative,
            strength=panel.prompt.strength,
            steps=panel.prompt.steps,
            seed=job.seed if job.seed is not None else panel.prompt.seed,
        )
        request = SynthesisRequest(
            base_image=panel.base,
            prompt=prompt.positive,
            negative_prompt=prompt.negative,
            strength=prompt.strength,
            steps=prompt.steps,
            seed=prompt.seed,
            width=session.scroll.panel_width,
            height=session.scroll.panel_height,
        )
        try:
            with self._inflight:
                result = synthesize(request, backend)
            result_path = session.panels_dir / f"{job.panel_index}.png"
            tmp = result_path.with_suffix(".png.tmp")
            tmp.write_bytes(result.image)
            tmp.replace(result_path)
            with session.lock:
                session.scroll = replace_result(
                    session.scroll, job.panel_index, result.image
                )
                total_width = session.scroll.total_width
            self._emit(
                session,
                "panel_ready",
                {
                    "utterance_id": panel.utterance_id,
                    "panel_index": job.panel_index,
                    "result_path": f"panels/{job.panel_index}.png",
                    "base_path": f"panels/{job.panel_index}.base.png",
                    "prompt": prompt.to_payload(),
                    "seed_used": result.seed_used,
                    "backend_id": result.backend_id,
                    "duration_ms": result.duration_ms,
                    "total_width": total_width,
                    "regenerated": True,
                },
            )
        except EquivalenceError as exc:
            self._emit(
                session,
                "panel_failed",
                {
                    "utterance_id": panel.utterance_id,
                    "panel_index": job.panel_index,
                    "error": type(exc).__name__,
                    "message": str(exc),
                },
            )

    # -- crash-restart restore -------------------------------------------------

    def restore(self) -> int:
        """Rebuild sessions from persisted logs; returns how many were loaded."""
        sessions_dir = self.data_dir / "sessions"
        if not sessions_dir.is_dir():
            return 0
        count = 0
        for root in sorted(p for p in sessions_dir.iterdir() if p.is_dir()):
            session = self._restore_session(root)
            with self._sessions_lock:
                self._sessions[session.session_id] = session
            self._start_worker(session)
            count += 1
        return count

    def _restore_session(self, root: Path) -> Session:
        session = Session(session_id=root.name, root=root, scroll=self._new_scroll())
        session.panels_dir.mkdir(exist_ok=True)
        events: list[SessionEvent] = []
        if session.events_path.exists():
            with session.events_path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        events.append(SessionEvent.from_json(json.loads(line)))
        session.events = events

        placeholder_png = BaseImage.from_array(
            placeholder_gradient(session.scroll.panel_width, session.scroll.panel_height)
        ).to_png()

        seen: dict[int, dict] = {}
        order: list[int] = []
        for event in events:
            if event.kind == "panel_ready":
                index = event.payload["panel_index"]
                if index not in seen:
                    order.append(index)
                seen[index] = {"payload": event.payload, "at": event.at}
            elif event.kind == "utterance_received":
                session.utterance_count += 1

        for index in order:
            payload = seen[index]["payload"]
            base = self._read_panel_file(session, f"{index}.base.png")
            result = self._read_panel_file(session, f"{index}.png")
            complete = base is not None and result is not None
            prompt_fields = payload.get("prompt", {})
            prompt = PromptSpec(
                positive=prompt_fields.get("positive", "untitled"),
                negative=prompt_fields.get("negative", ""),
                strength=prompt_fields.get("strength", 0.5),
                steps=prompt_fields.get("steps", 1),
                seed=prompt_fields.get("seed", 0),
            )
            panel = Panel(
                index=index,
                utterance_id=payload.get("utterance_id", ""),
                base=base if base is not None else placeholder_png,
                prompt=prompt,
                result=result if result is not None else placeholder_png,
                created_at=seen[index]["at"],
                curated=complete,  # missing file -> excluded, not fatal
            )
            try:
                session.scroll = append_panel(session.scroll, panel)
            except EquivalenceError:
                # e.g. stale panel file from an older panel geometry: keep the
                # session alive, mark the slot excluded with a placeholder
                panel = Panel(
                    index=index,
                    utterance_id=panel.utterance_id,
                    base=placeholder_png,
                    prompt=prompt,
                    result=placeholder_png,
                    created_at=panel.created_at,
                    curated=False,
                )
                session.scroll = append_panel(session.scroll, panel)

        if order:
            session.next_panel_index = max(order) + 1

        if session.curation_path.exists():
            try:
                stored = json.loads(session.curation_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                stored = {}
            for panel in session.scroll.panels:
                wanted = stored.get(str(panel.index))
                # files lost on disk stay excluded regardless of the sidecar
                if wanted is False and panel.curated:
                    session.scroll = set_curated(session.scroll, panel.index, False)
        return session

    @staticmethod
    def _read_panel_file(session: Session, name: str) -> bytes | None:
        path = session.panels_dir / name
        try:
            return path.read_bytes()
        except OSError:
            return None
