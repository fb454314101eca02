import sys

import agentyper as typer

from mammo_augment import __version__
from mammo_augment.commands.report import evaluate, report
from mammo_augment.commands.root import replay, validate
from mammo_augment.commands.stages import augment, preprocess, split

app = typer.Agentyper(
    name="mammo-augment",
    version=__version__,
    help="ROI-aware mammogram augmentation and dataset pipeline.",
)

app.command(name="validate")(validate)
app.command(name="preprocess")(preprocess)
app.command(name="split")(split)
app.command(name="augment")(augment)
app.command(name="evaluate")(evaluate)
app.command(name="report")(report)
app.command(name="replay")(replay)


def main(args=None):
    if args is not None:
        _old_argv = sys.argv
        sys.argv = ["mammo"] + args
        try:
            app()
        finally:
            sys.argv = _old_argv
    else:
        app()


if __name__ == "__main__":
    main()
