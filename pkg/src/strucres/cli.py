"""Command line front end: batch queries (``strucres run``) and a REPL (``strucres repl``).

Exit codes: 0 answer found, 1 failure, 2 rejected as non-productive,
3 fuel exhausted, 64 usage error, 65 parse error, 66 unreadable file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from .program import Clause, Program, TypingFunction
from .reductions import productivity_check
from .search import (CoinductiveAnswer, Exhausted, Fail, FuelOut, ImpliedWitness, InductiveFailure,
                     NonProductiveRejected, Observation, Refutation, colp_s_solve, implied_at_infinity,
                     observe, s_refute, sld_solve)
from .syntax import ParseError, parse_program, parse_query
from .terms import RationalTerm, Substitution, Term, Var, render, render_rational, var_namer, variables
from .trees import RewTree, find_success_subtree, to_dot

MODES = ("sld", "srew", "colp", "observe", "implied")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_REJECTED = 2
EXIT_FUEL = 3
EXIT_USAGE = 64
EXIT_PARSE = 65
EXIT_NOINPUT = 66

JSON_SCHEMA = {
    "type": "object",
    "required": ["query", "status", "answer", "resolvents"],
    "properties": {
        "query": {"type": "string"},
        "status": {"type": "string"},
        "answer": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["var", "term", "rational"],
                "properties": {
                    "var": {"type": "string"},
                    "term": {"type": "string"},
                    "rational": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
        "depth": {"type": "integer"},
        "resolvents": {"type": "integer"},
    },
    "additionalProperties": False,
}


@dataclass
class SessionConfig:
    mode: str = "srew"
    depth: Optional[int] = None
    fuel: Optional[int] = None
    dot_path: Optional[str] = None
    json: bool = False

    def check(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r} (choose from {', '.join(MODES)})")
        if self.mode in ("observe", "implied"):
            if self.depth is None:
                raise ValueError(f"mode {self.mode} needs a depth")
            if self.depth < 1:
                raise ValueError("depth must be at least 1")
        elif self.depth is not None:
            raise ValueError(f"mode {self.mode} takes no depth")
        if self.fuel is not None and self.fuel < 1:
            raise ValueError("fuel must be positive")


@dataclass
class QueryResult:
    status: str
    exit_code: int
    lines: List[str]
    answer: List[dict] = field(default_factory=list)
    resolvents: int = 0
    depth: Optional[int] = None
    tree: Optional[RewTree] = None

    def to_json(self, query: str) -> dict:
        out = {"query": query, "status": self.status, "answer": self.answer,
               "resolvents": self.resolvents}
        if self.depth is not None:
            out["depth"] = self.depth
        return out


def _fuel(config: SessionConfig) -> dict:
    return {} if config.fuel is None else {"fuel": config.fuel}


def _entries(bindings: Dict[Var, Term], names, rational: bool = False) -> List[dict]:
    return [{"var": names(v), "term": render(t, var_name=names), "rational": rational}
            for v, t in bindings.items()]


def _answer_lines(entries: List[dict]) -> List[str]:
    return [f"{e['var']} = {e['term']}" + ("  (rational)" if e["rational"] else "") for e in entries]


def _namer_for(query_vars: Sequence[Var], *terms: Term):
    vs = list(query_vars)
    for t in terms:
        vs.extend(variables(t))
    return var_namer(vs)


def run_query(P: Program, typing: TypingFunction, query: Clause, config: SessionConfig) -> QueryResult:
    """Run one query and describe the outcome (no printing, no files)."""
    config.check()
    atoms = query.body
    qvars = list(dict.fromkeys(v for a in atoms for v in variables(a)))
    if config.mode in ("observe", "implied") and len(atoms) != 1:
        raise ValueError(f"mode {config.mode} takes a single-atom query")
    t = atoms[0] if len(atoms) == 1 else atoms
    try:
        if config.mode == "sld":
            answer = sld_solve(P, t, **_fuel(config))
            bindings = {v: answer.apply(v) for v in qvars if answer.apply(v) != v}
            entries = _entries(bindings, _namer_for(qvars, *bindings.values()))
            return QueryResult("success", EXIT_OK, _answer_lines(entries) or ["yes"], entries)
        if config.mode == "srew":
            return _refutation_result(s_refute(P, t, **_fuel(config)), qvars)
        if config.mode == "colp":
            res = colp_s_solve(P, t, typing, **_fuel(config))
            if isinstance(res, Refutation):
                return _refutation_result(res, qvars)
            return _rational_result(res)
        if config.mode == "observe":
            obs = observe(P, t, typing, config.depth, **_fuel(config))
            return _observation_result(obs, qvars)
        witness = implied_at_infinity(P, t, typing, config.depth, **_fuel(config))
        return _implied_result(witness, config.depth)
    except NonProductiveRejected as e:
        return QueryResult("rejected", EXIT_REJECTED,
                           ["rejected: non-productive", f"witness: {e.verdict.witness}"])
    except InductiveFailure as e:
        return QueryResult("inductive-failure", EXIT_FAIL, [f"no: {e}"])
    except Exhausted:
        return QueryResult("exhausted", EXIT_FAIL, ["no"])
    except Fail as e:
        return QueryResult("fail", EXIT_FAIL, [f"no: {e}"])
    except FuelOut as e:
        tree = e.deepest if isinstance(e.deepest, RewTree) else None
        return QueryResult("fuel-out", EXIT_FUEL, ["fuel exhausted"], tree=tree)


def _refutation_result(ref: Refutation, qvars: List[Var]) -> QueryResult:
    bindings = {v: ref.answer.apply(v) for v in qvars if ref.answer.apply(v) != v}
    names = _namer_for(qvars, *bindings.values())
    entries = _entries(bindings, names)
    lines = _answer_lines(entries)
    if not lines:
        # ground query: show the bindings made along the derivation instead
        path = dict(ref.final_tree.sigma) if ref.final_tree else {}
        tree_names = _namer_for(list(path), *path.values())
        lines = [f"{tree_names(v)} = {render(t, var_name=tree_names)}" for v, t in path.items()]
        lines.append("yes")
    return QueryResult("success", EXIT_OK, lines, entries, ref.steps, tree=ref.final_tree)


def _rational_result(ans: CoinductiveAnswer) -> QueryResult:
    entries = []
    for v, r in ans.rational.items():
        if r.is_finite():
            entries.append({"var": str(v), "term": render(r.to_term()), "rational": False})
        else:
            entries.append({"var": str(v), "term": render_rational(r), "rational": True})
    lines = _answer_lines(entries) or ["yes  (coinductive)"]
    return QueryResult("success", EXIT_OK, lines, entries, len(ans.resolvents), tree=ans.final_tree)


def _observation_result(obs: Observation, qvars: List[Var]) -> QueryResult:
    names = _namer_for(qvars, *obs.answer.values())
    entries = _entries(obs.answer, names)
    lines = _answer_lines(entries) or [render(obs.approximation)]
    lines.append(f"depth: {obs.depth}")
    return QueryResult("success", EXIT_OK, lines, entries, obs.resolvents_used, obs.depth,
                       tree=obs.final_tree)


def _implied_result(w: ImpliedWitness, depth: int) -> QueryResult:
    names = _namer_for(list(variables(w.term)), *w.residual)
    lines = [f"{render(w.term, var_name=names)} rewrites to "
             f"[{', '.join(render(g, var_name=names) for g in w.residual)}]"]
    total = 0
    for g, ev in w.evidence:
        kind = {Refutation: "refuted", CoinductiveAnswer: "loop answer",
                Observation: "observed"}[type(ev)]
        detail = ""
        if isinstance(ev, Observation):
            detail = f" as {render(ev.approximation, var_name=names)}"
            total += ev.resolvents_used
        elif isinstance(ev, Refutation):
            total += ev.steps
        else:
            total += len(ev.resolvents)
        lines.append(f"  {render(g, var_name=names)}: {kind}{detail}")
    lines.append("implied at infinity")
    return QueryResult("success", EXIT_OK, lines, [], total, depth)


def load_program(path: str) -> Tuple[Program, TypingFunction]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    P, typing, _ = parse_program(text)
    return P, typing


def _write_dot(result: QueryResult, path: str, err: TextIO) -> None:
    if result.tree is None:
        print(f"warning: no rewriting tree to write for this outcome", file=err)
        return
    success = find_success_subtree(result.tree)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_dot(result.tree, success))


def run_file(program_path: str, query: str, config: SessionConfig,
             out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        config.check()
    except ValueError as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    try:
        P, typing = load_program(program_path)
    except OSError as e:
        print(f"cannot read {program_path}: {e.strerror or e}", file=err)
        return EXIT_NOINPUT
    except ParseError as e:
        print(f"{program_path}: parse error: {e}", file=err)
        return EXIT_PARSE
    try:
        q = parse_query(query)
    except ParseError as e:
        print(f"query: parse error: {e}", file=err)
        return EXIT_PARSE
    try:
        result = run_query(P, typing, q, config)
    except ValueError as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    if config.json:
        print(json.dumps(result.to_json(query.strip()), ensure_ascii=False), file=out)
    else:
        for line in result.lines:
            print(line, file=out)
    if config.dot_path:
        _write_dot(result, config.dot_path, err)
    return result.exit_code


# -- REPL -----------------------------------------------------------------------------

REPL_HELP = """\
commands:
  :load FILE      load a program
  :mode M         one of sld, srew, colp, observe, implied
  :depth N        observation depth (observe, implied)
  :fuel N         search budget
  :productive     productivity verdict for the loaded program
  :dot FILE       write the final rewriting tree of later queries to FILE
  :quit           leave
queries: ?- goal, ..., goal."""


class Repl:
    def __init__(self, config: Optional[SessionConfig] = None, out: Optional[TextIO] = None):
        self.config = config or SessionConfig()
        self.out = out or sys.stdout
        self.program = Program(())
        self.typing = TypingFunction()

    def say(self, text: str) -> None:
        print(text, file=self.out)

    def load(self, path: str) -> None:
        self.program, self.typing = load_program(path)
        self.say(f"loaded {len(self.program)} clauses from {path}")

    def handle(self, line: str) -> bool:
        """Process one input line; returns False when the session should end."""
        line = line.strip()
        if not line or line.startswith("%"):
            return True
        try:
            if line.startswith(":"):
                return self.command(line)
            if line.startswith("?-"):
                self.query(line)
                return True
            self.say("unrecognised input; queries start with ?- and commands with ':' (try :help)")
        except (ValueError, OSError) as e:
            self.say(f"error: {e}")
        return True

    def command(self, line: str) -> bool:
        name, _, arg = line[1:].partition(" ")
        arg = arg.strip()
        if name in ("quit", "q", "exit"):
            return False
        if name == "help":
            self.say(REPL_HELP)
        elif name == "load":
            self.load(arg)
        elif name == "mode":
            if arg not in MODES:
                raise ValueError(f"unknown mode {arg!r} (choose from {', '.join(MODES)})")
            self.config.mode = arg
            self.say(f"mode: {arg}")
        elif name == "depth":
            self.config.depth = int(arg)
            self.say(f"depth: {arg}")
        elif name == "fuel":
            self.config.fuel = int(arg)
            self.say(f"fuel: {arg}")
        elif name == "productive":
            self.say(str(productivity_check(self.program)))
        elif name == "dot":
            self.config.dot_path = arg or None
            self.say(f"dot: {arg or 'off'}")
        else:
            self.say(f"unknown command :{name}; commands are :load :mode :depth :fuel "
                     ":productive :dot :quit (:help for details)")
        return True

    def query(self, text: str) -> None:
        q = parse_query(text)
        config = self.config
        if config.mode not in ("observe", "implied"):
            config = replace(config, depth=None)
        result = run_query(self.program, self.typing, q, config)
        for line in result.lines:
            self.say(line)
        if self.config.dot_path:
            _write_dot(result, self.config.dot_path, self.out)

    def loop(self, inp: Optional[TextIO] = None) -> int:
        inp = inp or sys.stdin
        interactive = inp.isatty()
        while True:
            if interactive:
                print("strucres> ", end="", file=self.out, flush=True)
            line = inp.readline()
            if not line:
                return EXIT_OK
            if not self.handle(line):
                return EXIT_OK


# -- argument parsing -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strucres", description="Structural resolution for Horn-clause programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run one query against a program file")
    run.add_argument("file")
    run.add_argument("query")
    run.add_argument("--mode", choices=MODES, default="srew")
    run.add_argument("--depth", type=int)
    run.add_argument("--fuel", type=int)
    run.add_argument("--dot", dest="dot_path")
    run.add_argument("--json", action="store_true")
    repl = sub.add_parser("repl", help="interactive session")
    repl.add_argument("file", nargs="?")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        config = SessionConfig(args.mode, args.depth, args.fuel, args.dot_path, args.json)
        return run_file(args.file, args.query, config)
    repl = Repl()
    if args.file:
        try:
            repl.load(args.file)
        except OSError as e:
            print(f"cannot read {args.file}: {e.strerror or e}", file=sys.stderr)
            return EXIT_NOINPUT
        except ParseError as e:
            print(f"{args.file}: parse error: {e}", file=sys.stderr)
            return EXIT_PARSE
    return repl.loop()


if __name__ == "__main__":
    sys.exit(main())
