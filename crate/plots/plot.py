"""Quick-look plots for the experiment CSVs: python plot.py out/fig1.csv ..."""

import sys

import matplotlib.pyplot as plt
import pandas as pd


def fig1(df):
    plt.plot(df["mu"], df["g_star"], "k", label="desired")
    for col in df.columns[2:]:
        plt.plot(df["mu"], df[col], "--" if col.startswith("fir") else "-", label=col)
    plt.xlabel("mu")


def fig2(df):
    for name, part in df.groupby("filter"):
        plt.semilogy(part["t"], part["error"], label=name)
    plt.xlabel("t")


def fig3(df):
    for name, part in df.groupby("filter"):
        plt.errorbar(part["speed"], part["mean_error"], yerr=part["std_error"], label=name, capsize=3)
    plt.xlabel("speed")


def main():
    for path in sys.argv[1:]:
        df = pd.read_csv(path)
        plt.figure()
        {"mu": fig1, "t": fig2, "speed": fig3}[df.columns[0]](df)
        plt.legend()
        plt.title(path)
    plt.show()


if __name__ == "__main__":
    main()
