"""Regenerates the bundled fixture: a bias-free 2-conv + 2-dense network
trained on 8x8 digit images, exported as fixture_net.mxw (MXW1 container)
plus digits_test.csv (360 held-out samples, features then label).

Run from the repository root:  python3 data/make_fixture.py
"""

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split

torch.manual_seed(7)
np.random.seed(7)

digits = load_digits()
X = (digits.images / 16.0).astype(np.float32)
y = digits.target
Xtr, Xte, ytr, yte = train_test_split(X, y, test_size=360, random_state=0, stratify=y)


class Net(nn.Module):
    def __init__(self):
        super().__init__()
        self.c1 = nn.Conv2d(1, 6, 3, bias=False)
        self.c2 = nn.Conv2d(6, 12, 3, bias=False)
        self.d1 = nn.Linear(12, 32, bias=False)
        self.d2 = nn.Linear(32, 10, bias=False)

    def forward(self, x):
        x = F.relu(self.c1(x))   # 6x6x6
        x = F.avg_pool2d(x, 2)   # 3x3x6
        x = F.relu(self.c2(x))   # 1x1x12
        x = x.flatten(1)
        x = F.relu(self.d1(x))
        return self.d2(x)


net = Net()
opt = torch.optim.Adam(net.parameters(), lr=3e-3, weight_decay=1e-4)
xb = torch.tensor(Xtr).unsqueeze(1)
yb = torch.tensor(ytr)
for epoch in range(400):
    opt.zero_grad()
    loss = F.cross_entropy(net(xb), yb)
    loss.backward()
    opt.step()

with torch.no_grad():
    pred = net(torch.tensor(Xte).unsqueeze(1)).argmax(1).numpy()
print(f"test accuracy: {100.0 * (pred == yte).mean():.2f}%")

# Conv payload rows are (cout, (ky, kx, cin)) -- patches are row-major and
# channel-minor in the simulator; dense payload rows are (out, in).
W_c1 = net.c1.weight.detach().numpy().transpose(0, 2, 3, 1).reshape(6, -1)
W_c2 = net.c2.weight.detach().numpy().transpose(0, 2, 3, 1).reshape(12, -1)
W_d1 = net.d1.weight.detach().numpy()
W_d2 = net.d2.weight.detach().numpy()

header = [
    "MXW1",
    "layers 9",
    "input 8 8 1",
    "conv2d 3 3 1 6 1",
    "relu",
    "mean_pool 2",
    "conv2d 3 3 6 12 1",
    "relu",
    "dense 12 32",
    "relu",
    "dense 32 10",
    "softmax_argmax",
    "end",
]
with open("data/fixture_net.mxw", "wb") as f:
    f.write(("\n".join(header) + "\n").encode())
    for W in (W_c1, W_c2, W_d1, W_d2):
        f.write(W.astype("<f4").tobytes())

with open("data/digits_test.csv", "w") as f:
    for i in range(len(yte)):
        row = ",".join(repr(float(v)) for v in Xte[i].reshape(-1))
        f.write(row + "," + str(int(yte[i])) + "\n")
print("wrote data/fixture_net.mxw and data/digits_test.csv")
