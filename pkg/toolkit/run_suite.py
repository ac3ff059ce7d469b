from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from pathlib import Path

from dotenv import load_dotenv

from toolkit.deltakit.core.cache import configure_cache, get_cache
from toolkit.deltakit.core.cli import add_runtime_args, apply_runtime_overrides
from toolkit.deltakit.core.config import Settings
from toolkit.deltakit.core.errors import FormulaSyntaxError
from toolkit.deltakit.suite.battery import load_battery
from toolkit.deltakit.suite.corpus import BUNDLED_CORPUS, CorpusEntry, load_corpus
from toolkit.deltakit.suite.suites import SUITES, InstanceResult, SuiteContext, SuiteReport, run_instance

logger = logging.getLogger("deltakit.suite")


def run_suite(
    suite: str,
    corpus: list[CorpusEntry],
    ctx: SuiteContext,
    *,
    workers: int = 1,
    deadline: float | None = None,
) -> SuiteReport:
    """Evaluate every instance; results are ordered by instance index whatever the completion order."""
    results: list[InstanceResult] = []
    timed_out = False
    pool = ThreadPoolExecutor(max_workers=max(1, workers), thread_name_prefix="deltakit-suite")
    try:
        pending: set[Future[InstanceResult]] = {pool.submit(run_instance, suite, e, ctx, corpus) for e in corpus}
        while pending:
            remaining = None if deadline is None else deadline - time.monotonic()
            if remaining is not None and remaining <= 0:
                timed_out = True
                break
            done, pending = wait(pending, timeout=remaining, return_when=FIRST_COMPLETED)
            for fut in done:
                results.append(fut.result())
        if timed_out:
            for fut in pending:
                fut.cancel()
            logger.warning("suite %s: global timeout with %d instances unfinished", suite, len(pending))
    finally:
        pool.shutdown(wait=not timed_out, cancel_futures=True)
    results.sort(key=lambda r: r.index)
    return SuiteReport(suite, ctx.seed, results, timed_out)


def main() -> None:
    parser = argparse.ArgumentParser(description="Run a property suite over a corpus of formulas.")
    parser.add_argument("suite", choices=sorted(SUITES))
    parser.add_argument("--corpus", default=str(BUNDLED_CORPUS), metavar="PATH", help="Corpus file (default: bundled).")
    parser.add_argument("--battery", metavar="PATH", help="Decide-equivalence battery (default: generated from the seed).")
    parser.add_argument("--out", metavar="PATH", help="Write the JSON report here instead of stdout.")
    parser.add_argument("--workers", type=int, metavar="N", help="Concurrent instances (DELTAKIT_SUITE_WORKERS).")
    parser.add_argument("--global-timeout", type=float, metavar="SECONDS", help="Stop the whole run after this long.")
    add_runtime_args(parser)
    args = parser.parse_args()

    load_dotenv()
    apply_runtime_overrides(args)
    settings = Settings.from_env()
    logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))
    configure_cache(settings)

    try:
        corpus = load_corpus(args.corpus)
        battery = tuple(load_battery(args.battery)) if args.battery else ()
    except (OSError, FormulaSyntaxError) as e:
        print(f"run_suite: {e}", file=sys.stderr)
        sys.exit(2 if isinstance(e, FormulaSyntaxError) else 1)

    ctx = SuiteContext(settings, settings.seed, battery)
    deadline = time.monotonic() + args.global_timeout if args.global_timeout else None
    started = time.monotonic()
    report = run_suite(args.suite, corpus, ctx, workers=args.workers or settings.suite_workers, deadline=deadline)
    logger.info(
        "suite %s: %d instances in %.1fs %s", args.suite, len(report.results), time.monotonic() - started, report.counts()
    )
    logger.debug("cache: %s", get_cache().debug_snapshot())

    text = json.dumps(report.to_json(), indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if report.timed_out:
        sys.exit(3)
    sys.exit(1 if report.failed else 0)


if __name__ == "__main__":
    main()
