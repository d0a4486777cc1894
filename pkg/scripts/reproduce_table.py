"""Print the four-strategy fidelity table next to the published values."""
from spindir.cli import format_fidelity
from spindir.fidelity import closed_form, kernel_fidelity

PUBLISHED = {
    "P": [0.75, 0.8, 0.8333, 0.8571, 0.875, 0.8889],
    "A": [0.7887, 0.8444, 0.8848, 0.9069, 0.9235, 0.9342],
    "O": [0.7887, 0.8449, 0.8873, 0.9114, 0.9306, 0.9429],
    "G": [0.8, 0.8889, 0.9412, 0.9697, 0.9846, 0.9922],
}

if __name__ == "__main__":
    print(f"{'':3}{'N':>3} {'closed':>10} {'kernel':>10} {'published':>10}  match")
    for s, row in PUBLISHED.items():
        for n, pub in zip(range(2, 8), row):
            f = closed_form(s, n)
            k = kernel_fidelity(s, n)
            ok = format_fidelity(f) == format_fidelity(pub)
            print(f"{s:3}{n:>3} {f:>10.6f} {k:>10.6f} {format_fidelity(pub):>10}  {'yes' if ok else 'NO'}")
