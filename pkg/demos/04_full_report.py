"""End-to-end evaluation of stored outputs, library-only (the `multiscore`
CLI wraps exactly these calls).

Builds a small dataset in memory, attaches system outputs, runs the full
battery, and renders every report format.
"""

from multiscore import Dataset, EvalInstance, bind_outputs, evaluate_all, render

dataset = Dataset(instances=(
    EvalInstance(
        id="bridge",
        references=(
            "the alpha bridge spans the green river .",
            "alpha bridge crosses the green river .",
            "the green river is crossed by the alpha bridge .",
        ),
    ),
    EvalInstance(
        id="tower",
        references=(
            "the old tower stands above the town .",
            "an old tower overlooks the town .",
            "the town lies below the old tower .",
        ),
    ),
))

# a system that found two good phrasings but repeated one of them
outputs = {
    "bridge": [
        "the alpha bridge spans the green river .",
        "the alpha bridge spans the green river .",
        "alpha bridge crosses the green river .",
    ],
    "tower": [
        "the old tower stands above the town .",
        "an old tower overlooks the town .",
        "the old tower is above the town .",
    ],
}

report = evaluate_all(bind_outputs(dataset, outputs))

print(render(report, "table").decode())
print(render(report, "tsv").decode())
print(render(report, "json").decode())

# per-instance view: the duplicated bridge output was forced onto a
# reference it matches poorly, dragging MS-B down while plain quality
# metrics hardly noticed
for summary in report.per_instance:
    print(f"{summary.id}: MS-B {summary.ms_bleu:.2f}  MS-C {summary.ms_chrf:.2f}  Self-B {summary.self_bleu:.2f}")
