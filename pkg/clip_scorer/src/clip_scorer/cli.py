import sys

import click

from .backends import DEFAULT_MODEL, BackendError, make_backend
from .scorer import ScorerError, load_captions, score_frames, write_records


@click.command()
@click.option("--input", "input_path", required=True,
              help="Image directory or video file.")
@click.option("--captions", "captions_path", required=True,
              help="JSON object mapping predicate names to captions.")
@click.option("--model", default=DEFAULT_MODEL, show_default=True,
              help="Embedding model name.")
@click.option("--backend", default="clip", show_default=True,
              type=click.Choice(["clip", "stub"]),
              help="Embedding backend; 'stub' is deterministic and offline.")
@click.option("--stride", default=1, show_default=True,
              help="Sample every Nth frame.")
@click.option("--workers", default=1, show_default=True,
              help="Parallel image-embedding workers.")
@click.option("--out", "out_path", default="-", show_default=True,
              help="Output path for scores JSONL ('-' for stdout).")
def main(input_path, captions_path, model, backend, stride, workers, out_path):
    """Score media frames against predicate captions, one JSON line per
    (frame, predicate) pair with the cosine similarity of their embeddings."""
    try:
        captions = load_captions(captions_path)
        records = score_frames(input_path, captions,
                               make_backend(backend, model),
                               stride=stride, workers=workers)
    except (ScorerError, BackendError) as exc:
        raise click.ClickException(str(exc))
    if out_path == "-":
        write_records(records, sys.stdout)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            write_records(records, handle)
        click.echo(f"wrote {len(records)} records to {out_path}", err=True)


if __name__ == "__main__":
    main()
